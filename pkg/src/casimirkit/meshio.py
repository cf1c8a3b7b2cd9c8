"""File formats: ASCII OFF meshes plus sidecar field / area / form files.

The field file holds one real per line in vertex order; the optional
area file one real per triangle; a form file one line ``u v value`` per
directed mesh edge (antisymmetric under reversal).
"""

import numpy as np

from .errors import CountMismatch, ParseError
from .oneform import DiscreteOneForm
from .surface import TriangulatedSurface, classify_vertices


def _tokens(path):
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                out.extend(line.split())
    return out


def read_off(path):
    """Parse an ASCII OFF file into (vertices, triangles)."""
    toks = _tokens(path)
    if not toks:
        raise ParseError(f"{path}: empty file")
    i = 0
    if toks[0].upper() == "OFF":
        i = 1
    try:
        nv, nf, _ne = int(toks[i]), int(toks[i + 1]), int(toks[i + 2])
        i += 3
        verts = np.array(toks[i:i + 3 * nv], dtype=float).reshape(nv, 3)
        i += 3 * nv
        faces = []
        for _ in range(nf):
            k = int(toks[i])
            if k != 3:
                raise ParseError(f"{path}: only triangle faces supported, got {k}-gon")
            faces.append([int(toks[i + 1]), int(toks[i + 2]), int(toks[i + 3])])
            i += 1 + k
    except (ValueError, IndexError) as exc:
        raise ParseError(f"{path}: malformed OFF data ({exc})") from exc
    return verts, np.array(faces, dtype=np.int64)


def read_scalars(path):
    """One float per non-empty line."""
    try:
        vals = [float(t) for t in _tokens(path)]
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return np.array(vals, dtype=float)


def load_surface(mesh_path, field_path, area_path=None):
    """Load and validate an OFF mesh with its scalar field sidecar.

    Returns ``(surface, field)`` with the field classified.  An optional
    per-triangle area file overrides position-derived areas.
    """
    verts, tris = read_off(mesh_path)
    areas = None
    if area_path is not None:
        areas = read_scalars(area_path)
        if len(areas) != len(tris):
            raise CountMismatch(
                f"{area_path}: {len(areas)} areas for {len(tris)} triangles"
            )
    surface = TriangulatedSurface(verts, tris, triangle_areas=areas)
    values = read_scalars(field_path)
    if len(values) != surface.n_vertices:
        raise CountMismatch(
            f"{field_path}: {len(values)} values for {surface.n_vertices} vertices"
        )
    return surface, classify_vertices(surface, values)


def write_off(path, surface):
    v = surface.vertices
    if v is None:
        raise ValueError("cannot write OFF without vertex positions")
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{surface.n_vertices} {len(surface.triangles)} {surface.n_edges}\n")
        for p in v:
            fh.write(f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
        for t in surface.triangles:
            fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def write_scalars(path, values):
    with open(path, "w") as fh:
        for x in values:
            fh.write(f"{x:.17g}\n")


def read_oneform(path, surface):
    """Parse ``u v value`` lines into a :class:`DiscreteOneForm`."""
    vals = np.zeros(surface.n_edges)
    seen = np.zeros(surface.n_edges, dtype=bool)
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(f"{path}:{ln}: expected 'u v value'")
            try:
                u, v, x = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise ParseError(f"{path}:{ln}: {exc}") from exc
            try:
                e = surface.edge_index(u, v)
            except KeyError:
                raise ParseError(f"{path}:{ln}: ({u}, {v}) is not a mesh edge")
            sign = 1.0 if u < v else -1.0
            vals[e] = sign * x
            seen[e] = True
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        u, v = surface.edges[missing]
        raise CountMismatch(f"{path}: no value for edge ({u}, {v})")
    return DiscreteOneForm(surface, vals)


def write_oneform(path, form):
    with open(path, "w") as fh:
        for (u, v), x in zip(form.surface.edges, form.values):
            fh.write(f"{u} {v} {x:.17g}\n")

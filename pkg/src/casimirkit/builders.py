"""Programmatic fixture meshes: spheres, flat tori, embedded tori.

The flat torus carries explicit uniform triangle areas (its chart
positions wrap around, so position-derived areas would be wrong for seam
triangles); closed 1-forms dx, dy and exact grid shears/translations are
available for it.
"""

import numpy as np

from .oneform import DiscreteOneForm
from .surface import TriangulatedSurface


# -- spheres ----------------------------------------------------------


def octahedron():
    """The regular octahedron inscribed in the unit sphere."""
    verts = np.array(
        [
            [1, 0, 0], [-1, 0, 0],
            [0, 1, 0], [0, -1, 0],
            [0, 0, 1], [0, 0, -1],
        ],
        dtype=float,
    )
    tris = np.array(
        [
            [0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
            [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5],
        ],
        dtype=np.int64,
    )
    return TriangulatedSurface(verts, tris)


def sphere_octahedron(refinements=0):
    """Octahedron subdivided ``refinements`` times, vertices on the sphere."""
    surf = octahedron()
    verts = [tuple(p) for p in surf.vertices]
    tris = surf.triangles.tolist()
    for _ in range(refinements):
        midpoint = {}
        new_tris = []

        def mid(a, b):
            key = (a, b) if a < b else (b, a)
            if key not in midpoint:
                p = np.array(verts[a]) + np.array(verts[b])
                p = p / np.linalg.norm(p)
                midpoint[key] = len(verts)
                verts.append(tuple(p))
            return midpoint[key]

        for a, b, c in tris:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_tris += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        tris = new_tris
    return TriangulatedSurface(np.array(verts), np.array(tris, dtype=np.int64))


# -- flat torus -------------------------------------------------------


class FlatTorus:
    """Uniform n-by-n grid triangulation of the flat square torus.

    Vertex ``(i, j)`` sits at chart coordinates ``(i h, j h)`` with
    ``h = 2 pi / n``; each grid cell is split along the (1, 1) diagonal.
    """

    def __init__(self, n):
        self.n = n
        self.h = 2 * np.pi / n
        idx = lambda i, j: (i % n) * n + (j % n)
        self.index = idx
        ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        x = ii.ravel() * self.h
        y = jj.ravel() * self.h
        verts = np.column_stack([x, y, np.zeros(n * n)])
        tris = []
        for i in range(n):
            for j in range(n):
                v00, v10 = idx(i, j), idx(i + 1, j)
                v01, v11 = idx(i, j + 1), idx(i + 1, j + 1)
                tris.append([v00, v10, v11])
                tris.append([v00, v11, v01])
        areas = np.full(2 * n * n, self.h * self.h / 2.0)
        self.surface = TriangulatedSurface(verts, np.array(tris, dtype=np.int64),
                                           triangle_areas=areas)
        self.x = x
        self.y = y

    def sample(self, fn):
        """Vertex samples of a function of chart coordinates (x, y)."""
        return fn(self.x, self.y)

    def _edge_displacements(self):
        n = self.n
        e = self.surface.edges
        iu, ju = e[:, 0] // n, e[:, 0] % n
        iv, jv = e[:, 1] // n, e[:, 1] % n
        di = ((iv - iu + n // 2) % n) - n // 2
        dj = ((jv - ju + n // 2) % n) - n // 2
        return di, dj

    def closed_form_dx(self):
        """The closed (non-exact) 1-form dx on mesh edges."""
        di, _ = self._edge_displacements()
        return DiscreteOneForm(self.surface, self.h * di.astype(float))

    def closed_form_dy(self):
        _, dj = self._edge_displacements()
        return DiscreteOneForm(self.surface, self.h * dj.astype(float))

    def mapped_mesh(self, shear=0, translate=(0, 0)):
        """Image mesh under the exact area-preserving map
        ``(i, j) -> (i + shear*j + a, j + b)`` (mod n).

        Returns a new :class:`TriangulatedSurface` (same vertex set,
        image triangles, uniform areas) and the vertex permutation
        ``phi`` with ``phi[v]`` the image of vertex ``v``; a field F
        pushes forward to ``F[inverse permutation]``.
        """
        n = self.n
        a, b = translate
        v = np.arange(n * n)
        i, j = v // n, v % n
        phi = ((i + shear * j + a) % n) * n + ((j + b) % n)
        tris = phi[self.surface.triangles]
        areas = np.full(2 * n * n, self.h * self.h / 2.0)
        mapped = TriangulatedSurface(self.surface.vertices, tris,
                                     triangle_areas=areas)
        return mapped, phi

    def pushforward_values(self, values, phi):
        """Values of F composed with the inverse of the vertex map phi."""
        out = np.empty_like(values)
        out[phi] = values
        return out


# -- embedded tori ----------------------------------------------------


def torus_of_revolution(n=64, R=2.0, r=1.0):
    """Torus of revolution about the y-axis, tube angle phi, ring angle theta."""
    th = np.arange(n) * (2 * np.pi / n)
    ph = np.arange(n) * (2 * np.pi / n)
    theta, phi = np.meshgrid(th, ph, indexing="ij")
    theta, phi = theta.ravel(), phi.ravel()
    rad = R + r * np.cos(phi)
    verts = np.column_stack([rad * np.cos(theta), r * np.sin(phi),
                             rad * np.sin(theta)])
    idx = lambda i, j: (i % n) * n + (j % n)
    tris = []
    for i in range(n):
        for j in range(n):
            tris.append([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)])
            tris.append([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)])
    surf = TriangulatedSurface(verts, np.array(tris, dtype=np.int64))
    return surf, theta, phi


def two_maxima_torus(n=64, R=2.0, r=1.0, bump=0.5, skew=0.08):
    """Embedded torus with a height-like field: 1 min, 3 saddles, 2 maxima.

    The base height ``z`` has min/saddle at the bottom and saddle/max on
    the crown; a crown bump splits the top into two maxima and two extra
    saddles, and the skew term separates the saddle values.
    """
    surf, theta, phi = torus_of_revolution(n, R, r)
    z = surf.vertices[:, 2]
    taper = (1 + np.sin(theta)) / 2
    values = z + bump * taper * np.cos(2 * phi) + skew * taper * np.sin(phi)
    return surf, values


# -- double-bump sphere (measure-redistribution fixture) --------------


def _mirror_x_map(surface):
    """Vertex permutation of the reflection x -> -x (bitwise-exact)."""
    lookup = {tuple(p): i for i, p in enumerate(surface.vertices)}
    perm = np.empty(surface.n_vertices, dtype=np.int64)
    for i, p in enumerate(surface.vertices):
        perm[i] = lookup[(-p[0], p[1], p[2])]
    return perm


def double_bump_sphere(refinements=5, bump=1.5, asym=0.02, asym_start=1.45):
    """Sphere with F = z + bump*x^2: one min, one saddle, two maxima.

    The two maxima sit at x = +-sqrt(8)/3; a small perturbation applied
    only above ``asym_start`` separates their critical values while
    leaving the mid-band (used for measure transfers) bitwise mirror
    symmetric.
    """
    surf = sphere_octahedron(refinements)
    x = surf.vertices[:, 0]
    z = surf.vertices[:, 2]
    base = z + bump * x * x
    fmax = base.max()
    ramp = np.clip((base - asym_start) / (fmax - asym_start), 0.0, None) ** 2
    values = base + asym * ramp * x
    return surf, values, base


def transfer_band_measure(surface, base_values, band, amount):
    """Areas with mass moved between the two mirror branches in ``band``.

    Triangles wholly inside the value band on the x > 0 branch are scaled
    by ``1 + amount`` and their mirror images by ``1 - amount``; since the
    paired triangles carry bitwise-equal field values, every total moment
    is preserved exactly while per-branch moments shift.
    """
    lo, hi = band
    perm = _mirror_x_map(surface)
    tri_lookup = {frozenset(map(int, t)): k for k, t in enumerate(surface.triangles)}
    areas = surface.triangle_areas.copy()
    tv = base_values[surface.triangles]
    xs = surface.vertices[surface.triangles, 0]
    inside = (tv.min(axis=1) > lo) & (tv.max(axis=1) < hi) & (xs.min(axis=1) > 0)
    for k in np.flatnonzero(inside):
        mk = tri_lookup[frozenset(int(perm[v]) for v in surface.triangles[k])]
        areas[k] = surface.triangle_areas[k] * (1.0 + amount)
        areas[mk] = surface.triangle_areas[mk] * (1.0 - amount)
    return TriangulatedSurface(surface.vertices, surface.triangles,
                               triangle_areas=areas)

"""Closed oriented triangle meshes and piecewise-linear Morse fields.

A scalar field sampled at mesh vertices is classified by the connectivity
of lower links, with ties broken by vertex index.  A field is *simple*
when every saddle is nondegenerate, critical values are pairwise distinct
and no level component carries two critical points; only simple fields
admit the Reeb-graph construction downstream.
"""

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NonManifoldError, OrientationError, PerturbFailure

REGULAR = 0
MINIMUM = 1
MAXIMUM = 2
SADDLE = 3

KIND_NAMES = {REGULAR: "regular", MINIMUM: "min", MAXIMUM: "max", SADDLE: "saddle"}


class TriangulatedSurface:
    """Closed oriented triangulated surface with per-triangle area weights.

    Parameters
    ----------
    vertices : (V, 3) array or None
        Embedding positions.  May be omitted when only combinatorics and
        explicit areas are supplied.
    triangles : (T, 3) int array
        Vertex triples with globally consistent orientation.
    triangle_areas : (T,) array, optional
        Positive area weights.  Computed from positions when absent.
    """

    def __init__(self, vertices, triangles, triangle_areas=None):
        self.vertices = None if vertices is None else np.asarray(vertices, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.int64)
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise ValueError("triangles must be a (T, 3) array")
        if self.vertices is not None and self.vertices.shape[1] != 3:
            raise ValueError("vertex positions must be (V, 3)")

        if self.vertices is not None:
            self.n_vertices = self.vertices.shape[0]
        else:
            self.n_vertices = int(self.triangles.max()) + 1
        if self.triangles.min() < 0 or self.triangles.max() >= self.n_vertices:
            raise ValueError("triangle indices out of range")

        if triangle_areas is None:
            if self.vertices is None:
                raise ValueError("triangle_areas required when positions are absent")
            p = self.vertices
            t = self.triangles
            cross = np.cross(p[t[:, 1]] - p[t[:, 0]], p[t[:, 2]] - p[t[:, 0]])
            triangle_areas = 0.5 * np.linalg.norm(cross, axis=1)
        self.triangle_areas = np.asarray(triangle_areas, dtype=float)
        if self.triangle_areas.shape != (len(self.triangles),):
            raise ValueError("one area per triangle required")
        if np.any(self.triangle_areas <= 0):
            raise ValueError("all triangle areas must be positive")

        self._build_edges()
        self._check_closed_oriented()
        self._check_connected()
        self.total_area = float(self.triangle_areas.sum())

    # -- combinatorics -------------------------------------------------

    def _build_edges(self):
        t = self.triangles
        # directed edges of each triangle, in orientation order
        de = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        self._directed_edges = de
        und = np.sort(de, axis=1)
        edges, inverse = np.unique(und, axis=0, return_inverse=True)
        self.edges = edges                      # (E, 2), u < v
        self._tri_edge = inverse.reshape(3, -1).T   # (T, 3) edge index per tri side
        self.n_edges = len(edges)

        counts = np.bincount(inverse, minlength=self.n_edges)
        self._edge_counts = counts

        # two incident triangles per edge
        tri_of = np.tile(np.arange(len(t)), 3)
        order = np.argsort(inverse, kind="stable")
        self._edge_tris = np.full((self.n_edges, 2), -1, dtype=np.int64)
        if np.all(counts == 2):
            self._edge_tris[:, 0] = tri_of[order[0::2]]
            self._edge_tris[:, 1] = tri_of[order[1::2]]

    def _check_closed_oriented(self):
        bad = np.flatnonzero(self._edge_counts != 2)
        if len(bad):
            u, v = self.edges[bad[0]]
            raise NonManifoldError(
                f"edge ({u}, {v}) lies in {self._edge_counts[bad[0]]} triangles"
            )
        # orientation: each undirected edge must occur once per direction
        de = self._directed_edges
        forward = de[:, 0] < de[:, 1]
        und = np.sort(de, axis=1)
        key = und[:, 0] * self.n_vertices + und[:, 1]
        order = np.argsort(key, kind="stable")
        f = forward[order].reshape(-1, 2)
        conflict = np.flatnonzero(f[:, 0] == f[:, 1])
        if len(conflict):
            e = und[order[2 * conflict[0]]]
            raise OrientationError(
                f"edge ({e[0]}, {e[1]}) traversed twice in the same direction"
            )

    def _check_connected(self):
        e = self.edges
        m = coo_matrix(
            (np.ones(len(e)), (e[:, 0], e[:, 1])),
            shape=(self.n_vertices, self.n_vertices),
        )
        n_comp, _ = connected_components(m, directed=False)
        if n_comp != 1:
            raise NonManifoldError(f"surface has {n_comp} connected components")

    # -- topology ------------------------------------------------------

    @property
    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + len(self.triangles)

    @property
    def genus(self):
        chi = self.euler_characteristic
        if chi % 2 != 0:
            raise OrientationError(f"odd Euler characteristic {chi}")
        g = (2 - chi) // 2
        if g < 0:
            raise OrientationError(f"negative genus from chi={chi}")
        return g

    def vertex_star(self):
        """List of incident triangle indices per vertex."""
        if not hasattr(self, "_star"):
            star = [[] for _ in range(self.n_vertices)]
            for ti, tri in enumerate(self.triangles):
                for v in tri:
                    star[v].append(ti)
            self._star = star
        return self._star

    def edge_index(self, u, v):
        """Index into ``edges`` of the undirected edge (u, v)."""
        if not hasattr(self, "_edge_lookup"):
            self._edge_lookup = {
                (int(a), int(b)): i for i, (a, b) in enumerate(self.edges)
            }
        a, b = (u, v) if u < v else (v, u)
        return self._edge_lookup[(int(a), int(b))]


@dataclass
class MorseField:
    """Per-vertex scalar samples with their PL critical-point classes.

    ``kinds`` holds REGULAR/MINIMUM/MAXIMUM/SADDLE codes and
    ``multiplicities`` the saddle multiplicity (lower-link components
    minus one); ties are always broken by vertex index.
    """

    values: np.ndarray
    kinds: np.ndarray
    multiplicities: np.ndarray

    @property
    def critical_vertices(self):
        return np.flatnonzero(self.kinds != REGULAR)

    def order_keys(self):
        """Lexicographic (value, index) sort keys as a structured view."""
        return self.values


def _order_lt(values, a, b):
    """Total order on vertices: by value, ties by index."""
    va, vb = values[a], values[b]
    return va < vb or (va == vb and a < b)


def classify_vertices(surface, values):
    """Classify every vertex by the component count of its lower link.

    Returns a :class:`MorseField`.  The classification is total: 0 lower
    components gives a minimum, a full lower link a maximum, one
    component a regular vertex and k >= 2 a saddle of multiplicity k - 1.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (surface.n_vertices,):
        raise ValueError("one value per vertex required")

    tris = surface.triangles
    star = surface.vertex_star()
    kinds = np.zeros(surface.n_vertices, dtype=np.int8)
    mult = np.zeros(surface.n_vertices, dtype=np.int32)

    for v in range(surface.n_vertices):
        # link edges: the side opposite v in each incident triangle
        link_edges = []
        link_vertices = set()
        for ti in star[v]:
            a, b, c = tris[ti]
            if a == v:
                e = (b, c)
            elif b == v:
                e = (c, a)
            else:
                e = (a, b)
            link_edges.append(e)
            link_vertices.add(int(e[0]))
            link_vertices.add(int(e[1]))

        lower = {w for w in link_vertices if _order_lt(values, w, v)}
        if not lower:
            kinds[v] = MINIMUM
            continue
        if len(lower) == len(link_vertices):
            kinds[v] = MAXIMUM
            continue

        # count components of the lower link (union-find over lower vertices)
        parent = {w: w for w in lower}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in link_edges:
            a, b = int(a), int(b)
            if a in parent and b in parent:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
        n_comp = len({find(w) for w in lower})
        if n_comp == 1:
            kinds[v] = REGULAR
        else:
            kinds[v] = SADDLE
            mult[v] = n_comp - 1

    field = MorseField(values=values, kinds=kinds, multiplicities=mult)
    _check_poincare_hopf(surface, field)
    return field


def _check_poincare_hopf(surface, field):
    n_min = int(np.sum(field.kinds == MINIMUM))
    n_max = int(np.sum(field.kinds == MAXIMUM))
    total_mult = int(field.multiplicities.sum())
    chi = surface.euler_characteristic
    if n_min + n_max - total_mult != chi:
        raise OrientationError(
            f"PL Poincare-Hopf violated: {n_min} minima + {n_max} maxima - "
            f"{total_mult} saddle multiplicity != chi = {chi}"
        )


@dataclass
class SimpleMorseCertificate:
    """Witness that a field is simple Morse in the PL sense."""

    critical_vertices: np.ndarray      # sorted by (value, index)
    critical_values: np.ndarray

    ok: bool = True


@dataclass
class ViolationReport:
    """Named violations preventing simple-Morse certification."""

    violations: list = dataclass_field(default_factory=list)

    ok: bool = False

    def __str__(self):
        return "; ".join(f"{kind}{args}" for kind, *args in self.violations)


def certify_simple(field, surface):
    """Check Def-style simplicity of a classified field.

    Returns a :class:`SimpleMorseCertificate` on success, otherwise a
    :class:`ViolationReport` listing DegenerateSaddle, NonDistinctValues
    and SharedCriticalValue findings.
    """
    violations = []
    crit = field.critical_vertices
    for v in crit:
        if field.multiplicities[v] > 1:
            violations.append(("DegenerateSaddle", int(v), int(field.multiplicities[v])))

    cvals = field.values[crit]
    order = np.lexsort((crit, cvals))
    crit_sorted = crit[order]
    cvals_sorted = cvals[order]
    for i in range(len(crit_sorted) - 1):
        if cvals_sorted[i] == cvals_sorted[i + 1]:
            a, b = int(crit_sorted[i]), int(crit_sorted[i + 1])
            if _same_level_component(surface, field.values, a, b):
                violations.append(("SharedCriticalValue", a, b))
            else:
                violations.append(("NonDistinctValues", a, b))

    if violations:
        return ViolationReport(violations=violations)
    return SimpleMorseCertificate(
        critical_vertices=crit_sorted, critical_values=cvals_sorted
    )


def _same_level_component(surface, values, a, b):
    """Whether vertices a, b with equal value c lie on one level component.

    Connectivity of the level set F = c is modelled on triangles whose
    value range contains c, glued across shared edges whose range
    contains c.
    """
    c = values[a]
    tri = surface.triangles
    tv = values[tri]
    in_range = (tv.min(axis=1) <= c) & (tv.max(axis=1) >= c)
    idx = np.flatnonzero(in_range)
    if len(idx) == 0:
        return False
    pos = -np.ones(len(tri), dtype=np.int64)
    pos[idx] = np.arange(len(idx))

    ev = values[surface.edges]
    edge_ok = (ev.min(axis=1) <= c) & (ev.max(axis=1) >= c)
    rows, cols = [], []
    for e in np.flatnonzero(edge_ok):
        t0, t1 = surface._edge_tris[e]
        if pos[t0] >= 0 and pos[t1] >= 0:
            rows.append(pos[t0])
            cols.append(pos[t1])
    n = len(idx)
    m = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(m, directed=False)

    star = surface.vertex_star()
    la = labels[pos[star[a][0]]]
    lb = labels[pos[star[b][0]]]
    return la == lb


def perturb_to_simple(field, surface, eps_factor=1e-9):
    """Break exact value ties by an index-ordered perturbation.

    Produces a field with pairwise-distinct values; each value moves by
    at most ``eps_factor`` times the value range.  Raises
    :class:`PerturbFailure` when a degenerate saddle persists, since no
    value perturbation can reduce saddle multiplicity.
    """
    if np.any(field.multiplicities > 1):
        bad = np.flatnonzero(field.multiplicities > 1)
        raise PerturbFailure(
            f"degenerate saddle(s) at vertices {bad.tolist()} cannot be "
            "removed by value perturbation"
        )
    values = field.values
    if len(np.unique(values)) == len(values):
        return field

    rng = values.max() - values.min()
    eps = eps_factor * (rng if rng > 0 else 1.0)
    delta = eps / max(len(values), 1)
    order = np.lexsort((np.arange(len(values)), values))
    new = values.copy()
    prev = -np.inf
    for i in order:
        if new[i] <= prev:
            new[i] = np.nextafter(prev + delta, np.inf)
        prev = new[i]
    if np.any(np.abs(new - values) > eps * 1.0000001):
        raise PerturbFailure("perturbation budget exceeded; values too clustered")
    out = classify_vertices(surface, new)
    if not np.array_equal(out.kinds, field.kinds):
        # classification is tie-break consistent, so this indicates values
        # so dense the perturbation crossed a neighbour; report rather than mask
        raise PerturbFailure("perturbation altered the critical structure")
    return out

"""Reeb graph of a certified simple Morse field, with its quotient map.

The construction sweeps the critical values in increasing order and
tracks connected components of level sets (via sparse connected
components on slab regions), yielding the directed graph, the location
of every mesh vertex on it, and enough seed data to extract the level
cycle of any arc at any interior parameter by marching.
"""

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NotSimple, OutOfRange
from .surface import (MAXIMUM, MINIMUM, SADDLE, SimpleMorseCertificate,
                      certify_simple)

KIND_LABEL = {MINIMUM: "min", MAXIMUM: "max", SADDLE: "saddle"}


@dataclass
class ReebNode:
    id: int
    vertex: int          # mesh vertex realizing the critical level
    f: float
    kind: int            # MINIMUM / MAXIMUM / SADDLE
    in_arcs: list = dataclass_field(default_factory=list)
    out_arcs: list = dataclass_field(default_factory=list)


@dataclass
class ReebArc:
    id: int
    tail: int            # node id, f(tail) < f(head)
    head: int
    f_lo: float
    f_hi: float


class ReebGraph:
    """Oriented Reeb graph: 1- and 3-valent nodes, f strictly increasing
    along every arc, ``betti1 = E - V + 1``."""

    def __init__(self, nodes, arcs):
        self.nodes = nodes
        self.arcs = arcs
        self._validate()

    def _validate(self):
        for node in self.nodes:
            deg_in, deg_out = len(node.in_arcs), len(node.out_arcs)
            deg = deg_in + deg_out
            if node.kind in (MINIMUM, MAXIMUM):
                if deg != 1:
                    raise NotSimple(f"extremum node {node.id} has valence {deg}")
            elif node.kind == SADDLE:
                if deg != 3 or (deg_in, deg_out) not in ((2, 1), (1, 2)):
                    raise NotSimple(
                        f"saddle node {node.id} has degree pattern "
                        f"({deg_in} in, {deg_out} out)"
                    )
        for arc in self.arcs:
            if not self.nodes[arc.tail].f < self.nodes[arc.head].f:
                raise NotSimple(f"arc {arc.id} is not strictly increasing")

    @property
    def betti1(self):
        return len(self.arcs) - len(self.nodes) + 1

    def node_values(self):
        return np.array([n.f for n in self.nodes])


@dataclass
class IntervalRegion:
    """Product decomposition of the preimage of one open inter-critical
    interval: triangle component labels and the arc each component maps to."""

    f_lo: float
    f_hi: float
    labels: np.ndarray        # per triangle, -1 outside the region
    comp_to_arc: np.ndarray   # per component, arc id
    arc_to_comp: dict


class QuotientMap:
    """Projection data from the mesh onto the Reeb graph."""

    def __init__(self, surface, values, crit_values, intervals,
                 vertex_arc, vertex_node):
        self.surface = surface
        self.values = values
        self.crit_values = crit_values        # sorted critical values
        self.intervals = intervals            # list[IntervalRegion], len k-1
        self.vertex_arc = vertex_arc          # per vertex, arc id or -1
        self.vertex_node = vertex_node        # per vertex, node id or -1

    def locate_vertex(self, v):
        """(kind, id, f) with kind 'node' or 'arc'."""
        if self.vertex_node[v] >= 0:
            return ("node", int(self.vertex_node[v]), float(self.values[v]))
        return ("arc", int(self.vertex_arc[v]), float(self.values[v]))


@dataclass
class LevelCycle:
    """Closed polygonal level curve: crossing k sits on mesh edge
    (edge_u[k], edge_v[k]) at fraction ``frac`` from the u end, and
    ``tri[k]`` carries the segment from crossing k to crossing k+1."""

    edge_u: np.ndarray
    edge_v: np.ndarray
    frac: np.ndarray
    tri: np.ndarray

    def points(self, surface):
        if surface.vertices is None:
            raise ValueError("mesh carries no positions")
        pu = surface.vertices[self.edge_u]
        pv = surface.vertices[self.edge_v]
        s = self.frac[:, None]
        return (1 - s) * pu + s * pv

    def __len__(self):
        return len(self.tri)


def _regular_value_between(all_values, lo, hi):
    """A value strictly inside (lo, hi) distinct from every vertex value."""
    inside = all_values[(all_values > lo) & (all_values < hi)]
    cand = np.concatenate([[lo], np.unique(inside), [hi]])
    g = int(np.argmax(np.diff(cand)))
    return 0.5 * (cand[g] + cand[g + 1])


def _region_components(surface, values, lo, hi):
    """Connected components of triangles meeting the open f-band (lo, hi)."""
    tv = values[surface.triangles]
    fmin, fmax = tv.min(axis=1), tv.max(axis=1)
    in_region = (fmax > lo) & (fmin < hi)
    idx = np.flatnonzero(in_region)
    pos = -np.ones(len(surface.triangles), dtype=np.int64)
    pos[idx] = np.arange(len(idx))

    ev = values[surface.edges]
    glue = (ev.max(axis=1) > lo) & (ev.min(axis=1) < hi)
    et = surface._edge_tris[glue]
    rows = pos[et[:, 0]]
    cols = pos[et[:, 1]]
    keep = (rows >= 0) & (cols >= 0)
    n = len(idx)
    m = coo_matrix((np.ones(keep.sum()), (rows[keep], cols[keep])), shape=(n, n))
    n_comp, sub_labels = connected_components(m, directed=False)
    labels = -np.ones(len(surface.triangles), dtype=np.int64)
    labels[idx] = sub_labels
    return n_comp, labels


def _level_circles(surface, values, t):
    """Circle labels of the level set at the regular value t.

    Returns (crossing edge indices, per-crossing circle label, n_circles).
    """
    ev = values[surface.edges]
    crossing = (ev.min(axis=1) < t) & (ev.max(axis=1) > t)
    ce = np.flatnonzero(crossing)
    pos = -np.ones(surface.n_edges, dtype=np.int64)
    pos[ce] = np.arange(len(ce))

    tri_cross = crossing[surface._tri_edge]          # (T, 3) bool
    two = np.flatnonzero(tri_cross.sum(axis=1) == 2)
    pair_edges = surface._tri_edge[two]
    pair_mask = tri_cross[two]
    # extract the two crossing edges per such triangle
    flat = pair_edges[pair_mask].reshape(-1, 2)
    rows, cols = pos[flat[:, 0]], pos[flat[:, 1]]
    n = len(ce)
    m = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    n_circ, labels = connected_components(m, directed=False)
    return ce, labels, n_circ


class _ArcTracker:
    """Union-find over (level index, circle label) pairs."""

    def __init__(self):
        self.parent = {}

    def find(self, key):
        self.parent.setdefault(key, key)
        root = key
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[key] != root:
            self.parent[key], key = root, self.parent[key]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def build_reeb(surface, field, certificate=None):
    """Build the Reeb graph and quotient map of a certified simple field.

    Raises :class:`NotSimple` when certification fails.
    """
    if certificate is None:
        certificate = certify_simple(field, surface)
    if not isinstance(certificate, SimpleMorseCertificate) or not certificate.ok:
        raise NotSimple(certificate)

    values = field.values
    crit = certificate.critical_vertices
    cvals = certificate.critical_values
    k = len(crit)

    # regular probe levels between consecutive critical values
    t_levels = [_regular_value_between(values, cvals[j], cvals[j + 1])
                for j in range(k - 1)]

    circles = []          # per probe level: (crossing edges, labels, count)
    for t in t_levels:
        circles.append(_level_circles(surface, values, t))

    star = surface.vertex_star()
    tracker = _ArcTracker()
    # node bookkeeping: per critical index, circles entering/leaving
    node_in = [[] for _ in range(k)]
    node_out = [[] for _ in range(k)]

    tv = values[surface.triangles]
    tri_fmin, tri_fmax = tv.min(axis=1), tv.max(axis=1)

    for j in range(k):
        lo = -np.inf if j == 0 else t_levels[j - 1]
        hi = np.inf if j == k - 1 else t_levels[j]
        _, labels = _region_components(surface, values, lo, hi)
        vcomp = labels[star[crit[j]][0]]

        groups = {}
        if j > 0:
            ce, circ, n_circ = circles[j - 1]
            for c in range(n_circ):
                e = ce[np.flatnonzero(circ == c)[0]]
                comp = labels[surface._edge_tris[e][0]]
                groups.setdefault(comp, ([], []))[0].append((j - 1, c))
        if j < k - 1:
            ce, circ, n_circ = circles[j]
            for c in range(n_circ):
                e = ce[np.flatnonzero(circ == c)[0]]
                comp = labels[surface._edge_tris[e][0]]
                groups.setdefault(comp, ([], []))[1].append((j, c))

        for comp, (below, above) in groups.items():
            if comp == vcomp:
                continue
            if len(below) != 1 or len(above) != 1:
                raise NotSimple(
                    f"slab {j}: product region with {len(below)} lower and "
                    f"{len(above)} upper circles"
                )
            tracker.union(below[0], above[0])
        below, above = groups.get(vcomp, ([], []))
        node_in[j] = below
        node_out[j] = above

    # materialize arcs
    arc_of_root = {}
    arc_tail = {}
    arc_head = {}
    for j in range(k):
        for key in node_out[j]:
            root = tracker.find(key)
            arc_of_root.setdefault(root, len(arc_of_root))
            arc_tail[root] = j
        for key in node_in[j]:
            root = tracker.find(key)
            arc_of_root.setdefault(root, len(arc_of_root))
            arc_head[root] = j
    if set(arc_tail) != set(arc_head) or set(arc_tail) != set(arc_of_root):
        raise NotSimple("arc with a missing endpoint; field not simple")

    # deterministic arc order: by (f_lo, f_hi, first circle key)
    roots = sorted(
        arc_of_root,
        key=lambda r: (cvals[arc_tail[r]], cvals[arc_head[r]], r),
    )
    arc_index = {r: i for i, r in enumerate(roots)}

    nodes = [
        ReebNode(id=j, vertex=int(crit[j]), f=float(cvals[j]),
                 kind=int(field.kinds[crit[j]]))
        for j in range(k)
    ]
    arcs = []
    for r in roots:
        a = ReebArc(id=arc_index[r], tail=arc_tail[r], head=arc_head[r],
                    f_lo=float(cvals[arc_tail[r]]), f_hi=float(cvals[arc_head[r]]))
        arcs.append(a)
        nodes[a.tail].out_arcs.append(a.id)
        nodes[a.head].in_arcs.append(a.id)
    graph = ReebGraph(nodes, arcs)

    # circle -> arc map per probe level
    circle_arc = []
    for j in range(k - 1):
        _, _, n_circ = circles[j]
        ca = np.empty(n_circ, dtype=np.int64)
        for c in range(n_circ):
            ca[c] = arc_index[tracker.find((j, c))]
        circle_arc.append(ca)

    # interval product regions (for measures, vertex location, level cycles)
    intervals = []
    for j in range(k - 1):
        n_comp, labels = _region_components(surface, values, cvals[j], cvals[j + 1])
        ce, circ, n_circ = circles[j]
        comp_to_arc = -np.ones(n_comp, dtype=np.int64)
        for c in range(n_circ):
            e = ce[np.flatnonzero(circ == c)[0]]
            comp = labels[surface._edge_tris[e][0]]
            comp_to_arc[comp] = circle_arc[j][c]
        if np.any(comp_to_arc < 0) or n_comp != n_circ:
            raise NotSimple(
                f"interval {j}: {n_comp} regions for {n_circ} level circles"
            )
        intervals.append(IntervalRegion(
            f_lo=float(cvals[j]), f_hi=float(cvals[j + 1]), labels=labels,
            comp_to_arc=comp_to_arc,
            arc_to_comp={int(a): i for i, a in enumerate(comp_to_arc)},
        ))

    vertex_arc, vertex_node = _locate_vertices(
        surface, values, crit, cvals, intervals, nodes)
    qmap = QuotientMap(surface, values, cvals, intervals, vertex_arc, vertex_node)
    return graph, qmap


def _locate_vertices(surface, values, crit, cvals, intervals, nodes):
    n_v = surface.n_vertices
    vertex_arc = -np.ones(n_v, dtype=np.int64)
    vertex_node = -np.ones(n_v, dtype=np.int64)
    for node in nodes:
        vertex_node[node.vertex] = node.id

    # assign regular vertices through the interval regions of their star
    star = surface.vertex_star()
    order = np.lexsort((np.arange(n_v), values))    # key order for fallback
    crit_keys = {int(v) for v in crit}
    unresolved = []
    for v in range(n_v):
        if vertex_node[v] >= 0:
            continue
        j = int(np.searchsorted(cvals, values[v], side="right")) - 1
        j = min(max(j, 0), len(intervals) - 1)
        assigned = False
        for jj in (j, j - 1, j + 1):
            if 0 <= jj < len(intervals):
                for ti in star[v]:
                    comp = intervals[jj].labels[ti]
                    if comp >= 0 and intervals[jj].f_lo < values[v] < intervals[jj].f_hi:
                        vertex_arc[v] = intervals[jj].comp_to_arc[comp]
                        assigned = True
                        break
            if assigned:
                break
        if not assigned:
            unresolved.append(v)

    # plateau fallback: inherit the location of a key-ascending neighbour
    if unresolved:
        neigh = {}
        for u, w in surface.edges:
            neigh.setdefault(int(u), []).append(int(w))
            neigh.setdefault(int(w), []).append(int(u))
        for v in sorted(unresolved, key=lambda v: -values[v]):
            for w in sorted(neigh[v], key=lambda w: (values[w], w)):
                if vertex_arc[w] >= 0:
                    vertex_arc[v] = vertex_arc[w]
                    break
                if vertex_node[w] >= 0 and w not in crit_keys:
                    break
            if vertex_arc[v] < 0:
                # adopt an incident arc of the neighbouring node
                for w in neigh[v]:
                    if vertex_node[w] >= 0:
                        node = nodes[vertex_node[w]]
                        arcs = node.out_arcs or node.in_arcs
                        vertex_arc[v] = arcs[0]
                        break
    return vertex_arc, vertex_node


@dataclass
class CompatibilityReport:
    betti1: int
    genus: int

    @property
    def ok(self):
        return self.betti1 == self.genus

    def __str__(self):
        verdict = "compatible" if self.ok else "mismatch"
        return f"{verdict}: betti1(Gamma)={self.betti1}, genus(M)={self.genus}"


def check_compatibility(graph, surface):
    """First Betti number of the graph against the genus of the surface."""
    return CompatibilityReport(betti1=graph.betti1, genus=surface.genus)


def safe_level(values, t, upper):
    """Nudge t off an exact vertex value (toward ``upper`` if needed)."""
    uniq = np.unique(values)
    pos = np.searchsorted(uniq, t)
    if pos < len(uniq) and uniq[pos] == t:
        above = uniq[pos + 1] if pos + 1 < len(uniq) else upper
        t = 0.5 * (t + min(above, upper))
    return t


def level_cycle(qmap, arc, t):
    """The oriented level polyline of ``arc`` at interior parameter t.

    Crossing points interpolate linearly along mesh edges; the cycle is
    oriented as the boundary of the set of smaller field values.
    """
    if hasattr(arc, "id"):
        arc_id, f_lo, f_hi = arc.id, arc.f_lo, arc.f_hi
    else:
        raise TypeError("arc object expected")
    if not (f_lo < t < f_hi):
        raise OutOfRange(f"t={t:g} outside open range ({f_lo:g}, {f_hi:g})")

    values = qmap.values
    t = safe_level(values, t, f_hi)

    j = int(np.searchsorted(qmap.crit_values, t)) - 1
    if not (0 <= j < len(qmap.intervals)):
        raise OutOfRange(f"t={t:g} outside the critical range")
    region = qmap.intervals[j]
    comp = region.arc_to_comp.get(int(arc_id))
    if comp is None:
        raise OutOfRange(f"arc {arc_id} does not cross t={t:g}")

    surface = qmap.surface
    tris = surface.triangles
    cand = np.flatnonzero(region.labels == comp)
    tvc = values[tris[cand]]
    straddle = cand[(tvc.min(axis=1) < t) & (tvc.max(axis=1) > t)]
    if len(straddle) == 0:
        raise OutOfRange(f"no triangle of arc {arc_id} straddles t={t:g}")

    start = int(straddle[0])
    eu, ev_, fr, seq = [], [], [], []
    tri_cur = start
    entry = _ascending_crossing(surface, values, tri_cur, t)
    first_edge = entry
    while True:
        exit_ = _descending_crossing(surface, values, tri_cur, t)
        eu.append(entry[0])
        ev_.append(entry[1])
        fr.append((t - values[entry[0]]) / (values[entry[1]] - values[entry[0]]))
        seq.append(tri_cur)
        # move across the exit edge
        e = surface.edge_index(exit_[0], exit_[1])
        t0, t1 = surface._edge_tris[e]
        tri_cur = int(t1 if t0 == tri_cur else t0)
        entry = exit_
        if tri_cur == start and (entry[0], entry[1]) == (first_edge[0], first_edge[1]):
            break
        if len(seq) > len(tris):
            raise OutOfRange("level cycle failed to close")
    return LevelCycle(edge_u=np.array(eu), edge_v=np.array(ev_),
                      frac=np.array(fr), tri=np.array(seq))


def _ascending_crossing(surface, values, tri_index, t):
    """Directed side (below, above) of the triangle crossed going up."""
    a, b, c = surface.triangles[tri_index]
    for u, w in ((a, b), (b, c), (c, a)):
        if values[u] < t < values[w]:
            return int(u), int(w)
    raise OutOfRange(f"triangle {tri_index} has no ascending crossing at {t:g}")


def abstract_graph(node_values, arc_pairs):
    """A ReebGraph given directly by node f-values and (tail, head) pairs.

    Node kinds are inferred from valence; useful for graph-level fixtures
    that do not come from a mesh.
    """
    nodes = [ReebNode(id=i, vertex=-1, f=float(v), kind=SADDLE)
             for i, v in enumerate(node_values)]
    arcs = []
    for a, (u, w) in enumerate(arc_pairs):
        if node_values[u] > node_values[w]:
            u, w = w, u
        arcs.append(ReebArc(id=a, tail=u, head=w,
                            f_lo=float(node_values[u]),
                            f_hi=float(node_values[w])))
        nodes[u].out_arcs.append(a)
        nodes[w].in_arcs.append(a)
    for n in nodes:
        if len(n.in_arcs) + len(n.out_arcs) == 1:
            n.kind = MINIMUM if n.out_arcs else MAXIMUM
    return ReebGraph(nodes, arcs)


def _descending_crossing(surface, values, tri_index, t):
    a, b, c = surface.triangles[tri_index]
    for u, w in ((a, b), (b, c), (c, a)):
        if values[w] < t < values[u]:
            return int(w), int(u)
    raise OutOfRange(f"triangle {tri_index} has no descending crossing at {t:g}")

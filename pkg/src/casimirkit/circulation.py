"""Graph antiderivatives and circulation functions of 1-form cosets.

An antiderivative on the graph is determined by one offset per arc on
top of the arc's cumulative density profile; Newton-Leibniz then holds
by construction and only the Kirchhoff balance at nodes is solved.  The
circulation of a velocity 1-form is sampled by integrating it along
level cycles and verified against the pushforward of its vorticity
2-form, which the Whitney interpolation reproduces to roundoff.
"""

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import (AntiderivativeViolation, BadPinPlacement, Infeasible,
                     NoSolution)
from .measure import arc_cumulative, build_measure, edge_moments
from .oneform import curl, cycle_integral, exterior_derivative
from .reeb import build_reeb, level_cycle, safe_level


class GraphDensity:
    """Signed measure per arc: total and cumulative profile.

    Built either as the first-moment density ``rho(I) = int_I f dmu``
    (``f_weight``) or as a per-triangle-weighted pushforward such as the
    vorticity flux ``d(alpha)``.
    """

    def __init__(self, data, tri_weight=None, f_weight=False):
        self.graph = data.graph
        self.data = data
        self.tri_weight = tri_weight
        self.f_weight = f_weight
        col = 1 if f_weight else 0
        self.totals = edge_moments(data, n=2, tri_weight=tri_weight)[:, col]

    def total(self, arc_id):
        return float(self.totals[arc_id])

    def cumulative(self, arc_id, ts):
        """rho([f_lo(arc), t]) for query levels on the arc."""
        return arc_cumulative(self.data, arc_id, ts,
                              tri_weight=self.tri_weight,
                              f_weight=self.f_weight)


@dataclass
class AbstractDensity:
    """Per-arc totals with linear interpolation; for mesh-free graphs."""

    graph: object
    totals: np.ndarray

    def total(self, arc_id):
        return float(self.totals[arc_id])

    def cumulative(self, arc_id, ts):
        arc = self.graph.arcs[arc_id]
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        frac = (ts - arc.f_lo) / (arc.f_hi - arc.f_lo)
        return self.totals[arc_id] * np.clip(frac, 0.0, 1.0)


def graph_density(data):
    """The density rho(I) = int_I f dmu of a measured graph."""
    return GraphDensity(data, f_weight=True)


class Antiderivative:
    """lambda(t) = offset_arc + rho([f_lo, t]) on every arc."""

    def __init__(self, graph, density, offsets):
        self.graph = graph
        self.density = density
        self.offsets = np.asarray(offsets, dtype=float)

    def value(self, arc_id, t):
        out = self.offsets[arc_id] + self.density.cumulative(arc_id, t)
        return float(out[0]) if np.isscalar(t) else out

    def tail_limit(self, arc_id):
        return float(self.offsets[arc_id])

    def head_limit(self, arc_id):
        return float(self.offsets[arc_id] + self.density.total(arc_id))

    def node_residual(self, node_id):
        """Kirchhoff defect: sum of incoming minus outgoing limits."""
        node = self.graph.nodes[node_id]
        r = sum(self.head_limit(a) for a in node.in_arcs)
        r -= sum(self.tail_limit(a) for a in node.out_arcs)
        return r

    def max_node_residual(self):
        return max(abs(self.node_residual(n.id)) for n in self.graph.nodes)

    def limits(self):
        """(tail limit, head limit) per arc."""
        return [(self.tail_limit(a.id), self.head_limit(a.id))
                for a in self.graph.arcs]


def _spanning_tree(graph, root):
    """BFS tree: (parent node, parent arc) per node, plus non-tree arcs."""
    n = len(graph.nodes)
    parent = -np.ones(n, dtype=np.int64)
    parent_arc = -np.ones(n, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    incident = [[] for _ in range(n)]
    for a in graph.arcs:
        incident[a.tail].append(a.id)
        incident[a.head].append(a.id)
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    queue = [root]
    in_tree = np.zeros(len(graph.arcs), dtype=bool)
    while queue:
        v = queue.pop(0)
        for a_id in incident[v]:
            a = graph.arcs[a_id]
            w = a.head if a.tail == v else a.tail
            if not seen[w]:
                seen[w] = True
                parent[w] = v
                parent_arc[w] = a_id
                depth[w] = depth[v] + 1
                in_tree[a_id] = True
                queue.append(w)
    if not seen.all():
        raise NoSolution(float("nan"))  # disconnected graph
    return parent, parent_arc, depth, in_tree


def _fundamental_cycle(graph, parent, parent_arc, depth, chord):
    """Signed offset-shift vector of the cycle closed by the chord arc.

    The shift is +1 on arcs traversed tail to head along the cycle and
    -1 against; any such vector solves the homogeneous Kirchhoff system.
    """
    vec = np.zeros(len(graph.arcs))
    a = graph.arcs[chord]
    vec[chord] = 1.0
    # walk both endpoints up to their common ancestor
    u, w = a.head, a.tail         # continue the traversal from the head
    path_u, path_w = [], []
    du, dw = depth[u], depth[w]
    while du > dw:
        path_u.append((parent_arc[u], u))
        u = parent[u]
        du -= 1
    while dw > du:
        path_w.append((parent_arc[w], w))
        w = parent[w]
        dw -= 1
    while u != w:
        path_u.append((parent_arc[u], u))
        path_w.append((parent_arc[w], w))
        u, w = parent[u], parent[w]
    # from head down: moving from child to parent
    for arc_id, child in path_u:
        arc = graph.arcs[arc_id]
        vec[arc_id] += 1.0 if arc.tail == child else -1.0
    # from ancestor down to tail: parent to child
    for arc_id, child in reversed(path_w):
        arc = graph.arcs[arc_id]
        vec[arc_id] += 1.0 if arc.head == child else -1.0
    return vec


@dataclass
class AntiderivativeSpace:
    particular: Antiderivative
    basis: list                   # homogeneous offset vectors, len betti1
    residual: float

    @property
    def dimension(self):
        return len(self.basis)


def antiderivative_space(graph, density, tol=None):
    """All antiderivatives of the density: particular + cycle-shift basis.

    Exists iff the total density vanishes; the affine dimension equals
    the first Betti number of the graph.  1-valent node limits come out
    exactly zero by leaf elimination along a spanning tree.
    """
    totals = np.array([density.total(a.id) for a in graph.arcs])
    scale = np.abs(totals).sum() + 1e-300
    if tol is None:
        tol = 1e-9 * scale

    deg = [len(n.in_arcs) + len(n.out_arcs) for n in graph.nodes]
    root = next((n.id for n in graph.nodes if deg[n.id] > 1), 0)
    parent, parent_arc, depth, in_tree = _spanning_tree(graph, root)

    offsets = np.zeros(len(graph.arcs))
    order = np.argsort(-depth)
    for v in order:
        v = int(v)
        if v == root:
            continue
        a_id = int(parent_arc[v])
        node = graph.nodes[v]
        # Kirchhoff at v solved for the parent arc's offset
        rhs = 0.0
        for e in node.in_arcs:
            if e != a_id:
                rhs -= offsets[e] + totals[e]
        for e in node.out_arcs:
            if e != a_id:
                rhs += offsets[e]
        if a_id in node.in_arcs:
            offsets[a_id] = rhs - totals[a_id]
        else:
            offsets[a_id] = -rhs

    # the root equation is the solvability condition rho(Gamma) = 0
    node = graph.nodes[root]
    residual = sum(offsets[e] + totals[e] for e in node.in_arcs) \
        - sum(offsets[e] for e in node.out_arcs)
    if abs(residual) > tol:
        raise NoSolution(residual)

    basis = [_fundamental_cycle(graph, parent, parent_arc, depth, int(c))
             for c in np.flatnonzero(~in_tree)]
    particular = Antiderivative(graph, density, offsets)
    return AntiderivativeSpace(particular=particular, basis=basis,
                               residual=float(residual))


def pin_circulations(graph, density, pins, tol=1e-9):
    """The unique antiderivative through the pinned values.

    ``pins`` maps ``(arc id, t)`` to a prescribed value; cutting the
    pinned arcs must turn the graph into a tree (one pin per independent
    cycle), else :class:`BadPinPlacement`.
    """
    pins = dict(pins)
    pinned_arcs = [a for a, _ in pins]
    if len(set(pinned_arcs)) != len(pinned_arcs):
        raise BadPinPlacement("two pins on the same arc")
    if len(pins) != graph.betti1:
        raise BadPinPlacement(
            f"{len(pins)} pins for betti1 = {graph.betti1}"
        )
    _check_cut_tree(graph, set(pinned_arcs))

    space = antiderivative_space(graph, density)
    if not space.basis:
        return space.particular

    k = len(space.basis)
    M = np.zeros((k, k))
    r = np.zeros(k)
    for i, ((arc_id, t), value) in enumerate(sorted(pins.items())):
        want = value - float(density.cumulative(arc_id, t)[0])
        r[i] = want - space.particular.offsets[arc_id]
        for j, vec in enumerate(space.basis):
            M[i, j] = vec[arc_id]
    try:
        c = np.linalg.solve(M, r)
    except np.linalg.LinAlgError as exc:
        raise BadPinPlacement(f"pin system singular: {exc}") from exc
    if np.abs(M @ c - r).max() > tol * (np.abs(r).max() + 1.0):
        raise Infeasible("pinned values inconsistent with Kirchhoff")
    offsets = space.particular.offsets + sum(
        ci * vec for ci, vec in zip(c, space.basis))
    return Antiderivative(graph, density, offsets)


def _check_cut_tree(graph, pinned):
    """The graph minus the pinned arcs must be a connected tree."""
    n = len(graph.nodes)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    kept = 0
    for a in graph.arcs:
        if a.id in pinned:
            continue
        kept += 1
        ra, rb = find(a.tail), find(a.head)
        if ra == rb:
            raise BadPinPlacement("cut graph still contains a cycle")
        parent[ra] = rb
    if len({find(v) for v in range(n)}) != 1:
        raise BadPinPlacement("cut graph is disconnected")
    if kept != n - 1:
        raise BadPinPlacement("cut graph is not a tree")


def circulation_from_oneform(qmap, oneform, arc, t):
    """Integral of the 1-form along the arc's level cycle at level t.

    Independent of the coset representative: adding an exact form leaves
    every closed-cycle integral unchanged to machine precision.
    """
    cyc = level_cycle(qmap, arc, t)
    return cycle_integral(oneform, cyc)


@dataclass
class CirculationGraph:
    """Measured Reeb graph carrying the circulation antiderivative."""

    graph: object
    qmap: object
    data: object                  # exact pushforward measure
    moments: np.ndarray           # raw per-arc moments
    moments_rescaled: np.ndarray
    circulation: Antiderivative   # of the vorticity-flux density
    rho: object                   # first-moment density int f dmu
    sample_t: list                # per arc, levels where c was integrated
    sample_c: list
    newton_leibniz_residual: float = 0.0
    kirchhoff_residual: float = 0.0
    rho_deviation: float = 0.0    # |c' - rho| discretization diagnostic


def build_circulation_graph(surface, field, oneform, graph=None, qmap=None,
                            n_samples=8, n_moments=16, tol_factor=1e-6):
    """Assemble the full circulation graph of a velocity 1-form coset.

    The circulation function is anchored by one level-cycle integral per
    arc and extended by the exact cumulative vorticity flux; additional
    cycle integrals verify Newton-Leibniz and the node limits verify
    Kirchhoff, both within ``tol_factor`` times the circulation scale.
    """
    if graph is None or qmap is None:
        graph, qmap = build_reeb(surface, field)
    data = build_measure(surface, field.values, graph, qmap)
    flux = exterior_derivative(oneform)
    weight = flux / surface.triangle_areas
    rho_flux = GraphDensity(data, tri_weight=weight)
    rho = graph_density(data)

    offsets = np.zeros(len(graph.arcs))
    sample_t, sample_c = [], []
    for arc in graph.arcs:
        span = arc.f_hi - arc.f_lo
        ts = arc.f_lo + span * np.linspace(0.25, 0.75, n_samples)
        ts = np.array([safe_level(field.values, t, arc.f_hi) for t in ts])
        cs = np.array([circulation_from_oneform(qmap, oneform, arc, t)
                       for t in ts])
        mid = n_samples // 2
        offsets[arc.id] = cs[mid] - float(rho_flux.cumulative(arc.id, ts[mid])[0])
        sample_t.append(ts)
        sample_c.append(cs)

    circ = Antiderivative(graph, rho_flux, offsets)
    # floor the scale by the form's own magnitude so that identically
    # vanishing circulations (closed forms orthogonal to every cycle)
    # do not turn roundoff into a violation
    scale = max(max(np.abs(c).max() for c in sample_c),
                float(np.abs(oneform.values).max()), 1e-300)
    tol = tol_factor * scale

    nl = 0.0
    rho_dev = 0.0
    for arc in graph.arcs:
        pred = circ.value(arc.id, sample_t[arc.id])
        nl = max(nl, float(np.abs(pred - sample_c[arc.id]).max()))
        pred_rho = offsets[arc.id] + rho.cumulative(arc.id, sample_t[arc.id]) \
            - float(rho.cumulative(arc.id, sample_t[arc.id][n_samples // 2])[0]) \
            + sample_c[arc.id][n_samples // 2] - offsets[arc.id]
        rho_dev = max(rho_dev, float(np.abs(pred_rho - sample_c[arc.id]).max()))
    if nl > tol:
        raise AntiderivativeViolation("newton-leibniz", nl, tol)
    kirch = circ.max_node_residual()
    if kirch > tol:
        raise AntiderivativeViolation("kirchhoff", kirch, tol)

    return CirculationGraph(
        graph=graph, qmap=qmap, data=data,
        moments=edge_moments(data, n_moments),
        moments_rescaled=edge_moments(data, n_moments, rescaled=True),
        circulation=circ, rho=rho, sample_t=sample_t, sample_c=sample_c,
        newton_leibniz_residual=nl, kirchhoff_residual=kirch,
        rho_deviation=rho_dev,
    )


__all__ = [
    "GraphDensity", "AbstractDensity", "graph_density", "Antiderivative",
    "AntiderivativeSpace", "antiderivative_space", "pin_circulations",
    "circulation_from_oneform", "CirculationGraph", "build_circulation_graph",
    "curl",
]

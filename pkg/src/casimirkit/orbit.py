"""Coadjoint-orbit equivalence of vorticity data.

Two configurations are equivalent iff their measured Reeb graphs match
(same directed graph, node levels, and per-arc moments) and, beyond the
measures, the circulation limits agree arc by arc.  Simple Morse fields
have pairwise distinct node levels, so the node bijection is forced by
f-order and the search reduces to matching parallel-arc bundles by
moment signatures.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .circulation import build_circulation_graph
from .measure import build_measure, edge_moments
from .reeb import build_reeb


@dataclass
class MeasuredGraph:
    """A Reeb graph with per-arc moment data (and optional circulations)."""

    graph: object
    moments: np.ndarray             # raw, shape (n_arcs, N)
    moments_rescaled: np.ndarray    # f-range mapped to [0, 1]
    circ_limits: list = None        # per arc (tail, head) limits of c


def measured_graph(surface, field, n_moments=16, graph=None, qmap=None):
    """Pipeline shortcut: Reeb graph plus moments from a mesh and field."""
    if graph is None or qmap is None:
        graph, qmap = build_reeb(surface, field)
    data = build_measure(surface, field.values, graph, qmap)
    return MeasuredGraph(
        graph=graph,
        moments=edge_moments(data, n_moments),
        moments_rescaled=edge_moments(data, n_moments, rescaled=True),
    ), qmap, data


def measured_from_circulation(cg):
    limits = cg.circulation.limits()
    return MeasuredGraph(graph=cg.graph, moments=cg.moments,
                         moments_rescaled=cg.moments_rescaled,
                         circ_limits=limits)


@dataclass
class GraphMatching:
    node_map: dict
    arc_map: dict
    max_moment_discrepancy: float
    max_circulation_discrepancy: float = 0.0

    def __bool__(self):
        return True


@dataclass
class NotIsomorphic:
    witness: str

    def __bool__(self):
        return False


def _arc_signature_gap(m1, m2):
    """Relative discrepancy between two rescaled moment rows.

    Mass compared relatively; higher moments normalized by the mass
    (rescaled moments are bounded by m0, so the ratios live in [0, 1]).
    """
    g = abs(m1[0] - m2[0]) / max(m1[0], m2[0])
    r = np.abs(m1[1:] / m1[0] - m2[1:] / m2[0])
    return max(g, float(r.max()) if len(r) else 0.0)


def measured_iso(g1, g2, n=16, tol_rel=1e-8, tol_f=1e-8):
    """Moment-preserving directed-graph isomorphism, or a witness.

    Node levels must agree within ``tol_f`` times the level range; arcs
    between the same node pair are matched by trying bundle permutations
    against the rescaled moment signatures, accepting discrepancies up
    to ``tol_rel``.
    """
    a, b = g1.graph, g2.graph
    if len(a.nodes) != len(b.nodes):
        return NotIsomorphic(
            f"node count {len(a.nodes)} vs {len(b.nodes)}")
    if len(a.arcs) != len(b.arcs):
        return NotIsomorphic(f"arc count {len(a.arcs)} vs {len(b.arcs)}")

    fa = a.node_values()
    fb = b.node_values()
    span = max(fa.max() - fa.min(), fb.max() - fb.min(), 1e-300)
    # nodes come sorted by level; distinct levels force the bijection
    gap = np.abs(fa - fb).max()
    if gap > tol_f * span:
        k = int(np.argmax(np.abs(fa - fb)))
        return NotIsomorphic(
            f"node level mismatch at rank {k}: {fa[k]:.9g} vs {fb[k]:.9g}")
    for na, nb in zip(a.nodes, b.nodes):
        if na.kind != nb.kind:
            return NotIsomorphic(
                f"node kind mismatch at rank {na.id}")

    bundles_a = {}
    bundles_b = {}
    for arc in a.arcs:
        bundles_a.setdefault((arc.tail, arc.head), []).append(arc.id)
    for arc in b.arcs:
        bundles_b.setdefault((arc.tail, arc.head), []).append(arc.id)
    if set(bundles_a) != set(bundles_b):
        missing = set(bundles_a) ^ set(bundles_b)
        return NotIsomorphic(f"arc incidence mismatch at node pair "
                             f"{sorted(missing)[0]}")
    for key in bundles_a:
        if len(bundles_a[key]) != len(bundles_b[key]):
            return NotIsomorphic(f"parallel arc count mismatch at {key}")

    n = min(n, g1.moments_rescaled.shape[1], g2.moments_rescaled.shape[1])
    m1 = g1.moments_rescaled[:, :n]
    m2 = g2.moments_rescaled[:, :n]
    arc_map = {}
    worst = 0.0
    for key in sorted(bundles_a):
        ids_a, ids_b = bundles_a[key], bundles_b[key]
        best_gap, best_perm = np.inf, None
        for perm in permutations(ids_b):
            gap = max(_arc_signature_gap(m1[i], m2[j])
                      for i, j in zip(ids_a, perm))
            if gap < best_gap:
                best_gap, best_perm = gap, perm
        if best_gap > tol_rel:
            i = ids_a[0]
            return NotIsomorphic(
                f"edge moment mismatch on arc bundle {key}: "
                f"best discrepancy {best_gap:.3g} > {tol_rel:.3g}")
        arc_map.update(dict(zip(ids_a, best_perm)))
        worst = max(worst, best_gap)

    node_map = {na.id: nb.id for na, nb in zip(a.nodes, b.nodes)}
    return GraphMatching(node_map=node_map, arc_map=arc_map,
                         max_moment_discrepancy=worst)


def circulation_iso(g1, g2, n=16, tol_rel=1e-8, tol_f=1e-8, tol_circ=1e-6):
    """measured_iso extended with per-arc circulation limit agreement."""
    match = measured_iso(g1, g2, n=n, tol_rel=tol_rel, tol_f=tol_f)
    if not match:
        return match
    if g1.circ_limits is None or g2.circ_limits is None:
        raise ValueError("both graphs need circulation limits")
    scale = max(max(abs(x) for lim in g1.circ_limits for x in lim),
                max(abs(x) for lim in g2.circ_limits for x in lim), 1e-300)
    worst = 0.0
    for i, j in match.arc_map.items():
        t1, h1 = g1.circ_limits[i]
        t2, h2 = g2.circ_limits[j]
        gap = max(abs(t1 - t2), abs(h1 - h2)) / scale
        worst = max(worst, gap)
        if gap > tol_circ:
            return NotIsomorphic(
                f"circulation mismatch on arc {i} -> {j}: "
                f"relative gap {gap:.3g} > {tol_circ:.3g}")
    match.max_circulation_discrepancy = worst
    return match


@dataclass
class OrbitReport:
    """Full equivalence verdict with the Casimir values of both inputs."""

    verdict: object                 # GraphMatching | NotIsomorphic
    casimirs_a: dict
    casimirs_b: dict

    @property
    def same_orbit(self):
        return bool(self.verdict)


def _casimir_table(cg):
    return {
        "node_levels": [n.f for n in cg.graph.nodes],
        "moments": cg.moments.tolist(),
        "circulations": cg.circulation.limits(),
    }


def same_orbit(surface_a, field_a, form_a, surface_b, field_b, form_b,
               n=16, tol_rel=1e-8, tol_f=1e-8, tol_circ=1e-6):
    """End-to-end orbit equivalence of two vorticity configurations.

    Runs the full pipeline on both sides (Reeb graph, measure, moments,
    circulations) and compares the resulting complete Casimir sets.
    """
    cg_a = build_circulation_graph(surface_a, field_a, form_a)
    cg_b = build_circulation_graph(surface_b, field_b, form_b)
    verdict = circulation_iso(
        measured_from_circulation(cg_a), measured_from_circulation(cg_b),
        n=n, tol_rel=tol_rel, tol_f=tol_f, tol_circ=tol_circ)
    return OrbitReport(verdict=verdict,
                       casimirs_a=_casimir_table(cg_a),
                       casimirs_b=_casimir_table(cg_b))

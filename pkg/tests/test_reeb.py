"""Reeb graph construction, compatibility and level cycles."""

import numpy as np
import pytest

from casimirkit.builders import FlatTorus, double_bump_sphere
from casimirkit.errors import NotSimple, OutOfRange
from casimirkit.reeb import (abstract_graph, build_reeb, check_compatibility,
                             level_cycle, safe_level)
from casimirkit.surface import MAXIMUM, MINIMUM, SADDLE, classify_vertices


def test_sphere_height_graph(sphere_z):
    surf, field = sphere_z
    graph, qmap = build_reeb(surf, field)
    assert len(graph.nodes) == 2
    assert len(graph.arcs) == 1
    assert graph.betti1 == 0
    kinds = sorted(n.kind for n in graph.nodes)
    assert kinds == sorted([MINIMUM, MAXIMUM])
    arc = graph.arcs[0]
    assert graph.nodes[arc.tail].kind == MINIMUM
    assert graph.nodes[arc.head].kind == MAXIMUM


def test_two_band_torus_graph(torus_two_band):
    ft, field = torus_two_band
    graph, qmap = build_reeb(ft.surface, field)
    # cos y + 0.5 cos x: min, saddle, saddle, max with a double arc between
    assert len(graph.nodes) == 4
    assert len(graph.arcs) == 4
    assert graph.betti1 == 1
    kinds = [n.kind for n in sorted(graph.nodes, key=lambda n: n.f)]
    assert kinds == [MINIMUM, SADDLE, SADDLE, MAXIMUM]


def test_two_max_torus_graph(two_max_torus):
    surf, field = two_max_torus
    graph, qmap = build_reeb(surf, field)
    assert len(graph.nodes) == 6
    assert len(graph.arcs) == 6
    assert graph.betti1 == 1
    kinds = np.array([n.kind for n in graph.nodes])
    assert np.sum(kinds == MINIMUM) == 1
    assert np.sum(kinds == SADDLE) == 3
    assert np.sum(kinds == MAXIMUM) == 2


def test_compatibility_report(two_max_torus):
    surf, field = two_max_torus
    graph, _ = build_reeb(surf, field)
    report = check_compatibility(graph, surf)
    assert report.ok
    assert graph.betti1 == surf.genus


def test_double_bump_sphere_graph():
    surf, values, _ = double_bump_sphere(4)
    field = classify_vertices(surf, values)
    graph, _ = build_reeb(surf, field)
    # two maxima merged over one saddle above a single minimum
    kinds = sorted(n.kind for n in graph.nodes)
    assert kinds == sorted([MINIMUM, SADDLE, MAXIMUM, MAXIMUM])
    assert graph.betti1 == 0


def test_non_simple_rejected():
    ft = FlatTorus(16)
    field = classify_vertices(ft.surface, np.cos(ft.x))
    with pytest.raises(NotSimple):
        build_reeb(ft.surface, field)


def test_arc_values_strictly_increase(two_max_torus):
    surf, field = two_max_torus
    graph, _ = build_reeb(surf, field)
    for arc in graph.arcs:
        assert graph.nodes[arc.tail].f == arc.f_lo
        assert graph.nodes[arc.head].f == arc.f_hi
        assert arc.f_lo < arc.f_hi


def test_level_cycle_closes(torus_two_band):
    ft, field = torus_two_band
    graph, qmap = build_reeb(ft.surface, field)
    for arc in graph.arcs:
        t = safe_level(field.values, 0.5 * (arc.f_lo + arc.f_hi), arc.f_hi)
        cyc = level_cycle(qmap, arc, t)
        pts = cyc.points(ft.surface)
        assert len(pts) >= 3
        # interpolated field value is t at every crossing point
        vals = (1 - cyc.frac) * field.values[cyc.edge_u] \
            + cyc.frac * field.values[cyc.edge_v]
        assert np.allclose(vals, t, atol=1e-12)


def test_level_cycle_out_of_range(torus_two_band):
    ft, field = torus_two_band
    graph, qmap = build_reeb(ft.surface, field)
    arc = graph.arcs[0]
    with pytest.raises(OutOfRange):
        level_cycle(qmap, arc, arc.f_hi + 1.0)


def test_abstract_graph_valences():
    # min -> saddle -> (double arc) -> saddle -> max, genus-one shape
    g = abstract_graph([0.0, 1.0, 2.0, 3.0],
                       [(0, 1), (1, 2), (1, 2), (2, 3)])
    assert g.betti1 == 1
    assert [n.kind for n in g.nodes] == [MINIMUM, SADDLE, SADDLE, MAXIMUM]


def test_abstract_graph_rejects_bad_valence():
    with pytest.raises(NotSimple):
        abstract_graph([0.0, 1.0], [(0, 1), (0, 1), (0, 1)])

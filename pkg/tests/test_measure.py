"""Pushforward measure: moments, cumulative profiles, saddle asymptotics."""

import numpy as np
import pytest

from casimirkit.builders import FlatTorus, two_maxima_torus
from casimirkit.measure import (arc_cumulative, build_measure, edge_moments,
                                log_singularity_diagnostic,
                                pushforward_measure)
from casimirkit.reeb import build_reeb
from casimirkit.surface import SADDLE, classify_vertices


def test_total_mass_equals_area(two_max_torus):
    surf, field = two_max_torus
    graph, qmap = build_reeb(surf, field)
    data = build_measure(surf, field.values, graph, qmap)
    assert np.isclose(data.total_mass(), surf.total_area, rtol=1e-12)


def test_moment_zero_partitions_area(two_max_torus):
    surf, field = two_max_torus
    graph, qmap = build_reeb(surf, field)
    data = build_measure(surf, field.values, graph, qmap)
    m = edge_moments(data, n=1)
    assert np.isclose(m[:, 0].sum(), surf.total_area, rtol=1e-12)


def test_sphere_moments(sphere_z):
    # z pushforward on the unit sphere is uniform on [-1, 1] (Archimedes),
    # so m0 = 4 pi, m1 = 0, m2 = 4 pi / 3
    surf, field = sphere_z
    graph, qmap = build_reeb(surf, field)
    data = build_measure(surf, field.values, graph, qmap)
    m = edge_moments(data, n=3)
    total = m.sum(axis=0)
    area = surf.total_area
    assert np.isclose(total[0], area, rtol=1e-12)
    assert abs(total[1]) < 1e-2 * area
    assert np.isclose(total[2], area / 3.0, rtol=2e-2)


def test_cumulative_profile_monotone(torus_two_band):
    ft, field = torus_two_band
    graph, qmap = build_reeb(ft.surface, field)
    data = build_measure(ft.surface, field.values, graph, qmap)
    for arc in graph.arcs:
        ts = np.linspace(arc.f_lo, arc.f_hi, 33)[1:-1]
        cum = arc_cumulative(data, arc.id, ts)
        assert np.all(np.diff(cum) >= -1e-14)
        assert cum[0] >= 0.0


def test_cumulative_matches_moment_zero(torus_two_band):
    ft, field = torus_two_band
    graph, qmap = build_reeb(ft.surface, field)
    data = build_measure(ft.surface, field.values, graph, qmap)
    m = edge_moments(data, n=1)
    for arc in graph.arcs:
        near_top = arc.f_hi - 1e-12 * (arc.f_hi - arc.f_lo)
        cum = arc_cumulative(data, arc.id, np.array([near_top]))
        assert np.isclose(cum[0], m[arc.id, 0], rtol=1e-9)


def test_rescaled_moments_bounded(two_max_torus):
    surf, field = two_max_torus
    graph, qmap = build_reeb(surf, field)
    data = build_measure(surf, field.values, graph, qmap)
    m = edge_moments(data, n=8, rescaled=True)
    # on the [0, 1]-rescaled interval each moment is bounded by the mass
    assert np.all(m <= m[:, :1] + 1e-12)
    assert np.all(m >= -1e-12)


def test_pushforward_measure_profiles(sphere_z):
    surf, field = sphere_z
    graph, qmap = build_reeb(surf, field)
    ems = pushforward_measure(surf, field, graph, qmap, K=128, N=4)
    assert len(ems) == len(graph.arcs)
    em = ems[0]
    assert em.cumulative_area[0] <= em.cumulative_area[-1]
    assert np.isclose(em.moments[0], surf.total_area, rtol=1e-12)


def test_saddle_log_singularity(two_max_torus):
    surf, field = two_max_torus
    graph, qmap = build_reeb(surf, field)
    data = build_measure(surf, field.values, graph, qmap)
    saddles = [n for n in graph.nodes if n.kind == SADDLE]
    assert saddles
    fit = log_singularity_diagnostic(data, graph, saddles[0].id)
    # derivative asymptotics: trunk coefficient 2, branch coefficients -1
    assert np.max(np.abs(fit.eps_hat - np.array([2.0, -1.0, -1.0]))) < 0.2

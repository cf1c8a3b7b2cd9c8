"""Graph antiderivatives, pinning and circulation functions."""

import numpy as np
import pytest

from casimirkit.builders import FlatTorus
from casimirkit.circulation import (AbstractDensity, antiderivative_space,
                                    build_circulation_graph,
                                    circulation_from_oneform, graph_density,
                                    pin_circulations)
from casimirkit.errors import BadPinPlacement, NoSolution
from casimirkit.measure import build_measure
from casimirkit.oneform import exact_oneform
from casimirkit.reeb import abstract_graph, build_reeb, safe_level
from casimirkit.surface import classify_vertices


def genus_one_graph():
    """min -> saddle -> (two arcs) -> saddle -> max."""
    return abstract_graph([0.0, 1.0, 2.0, 3.0],
                          [(0, 1), (1, 2), (1, 2), (2, 3)])


def test_antiderivative_space_dimension():
    g = genus_one_graph()
    a = np.array([0.7, 0.2, -0.4, -0.5])       # zero-sum arc densities
    space = antiderivative_space(g, AbstractDensity(g, a))
    assert space.dimension == 1 == g.betti1


def test_antiderivative_labels_with_pin():
    g = genus_one_graph()
    a1, a2, a3, a4 = 0.7, 0.2, -0.4, -0.5
    dens = AbstractDensity(g, np.array([a1, a2, a3, a4]))
    z = 0.31
    # pin the tail limit of the first branch arc to z
    lam = pin_circulations(g, dens, {(1, g.arcs[1].f_lo): z})
    limits = lam.limits()
    want = [(0.0, a1), (z, a2 + z), (a1 - z, a1 + a3 - z), (-a4, 0.0)]
    for got, exp in zip(limits, want):
        assert np.allclose(got, exp, atol=1e-12)


def test_one_valent_limits_exactly_zero():
    g = genus_one_graph()
    dens = AbstractDensity(g, np.array([0.7, 0.2, -0.4, -0.5]))
    space = antiderivative_space(g, dens)
    lam = space.particular
    assert lam.tail_limit(0) == 0.0
    assert lam.head_limit(3) == 0.0


def test_nonzero_sum_has_no_antiderivative():
    g = genus_one_graph()
    dens = AbstractDensity(g, np.array([0.7, 0.2, -0.4, 0.1]))
    with pytest.raises(NoSolution):
        antiderivative_space(g, dens)


def test_pin_rejects_tree_arc():
    g = genus_one_graph()
    dens = AbstractDensity(g, np.array([0.7, 0.2, -0.4, -0.5]))
    # pinning the bridge arc 0 leaves the cycle uncut
    with pytest.raises(BadPinPlacement):
        pin_circulations(g, dens, {(0, g.arcs[0].f_lo): 0.1})


def test_pin_count_must_match_betti():
    g = genus_one_graph()
    dens = AbstractDensity(g, np.array([0.7, 0.2, -0.4, -0.5]))
    with pytest.raises(BadPinPlacement):
        pin_circulations(g, dens, {})


def test_circulation_graph_residuals(torus_two_band):
    ft, field = torus_two_band
    form = ft.closed_form_dx() + ft.closed_form_dy() * 0.5
    cg = build_circulation_graph(ft.surface, field, form)
    assert cg.newton_leibniz_residual < 1e-10
    assert cg.kirchhoff_residual < 1e-10


def test_circulation_coset_invariance(torus_two_band):
    # adding an exact form df must leave all circulations unchanged
    ft, field = torus_two_band
    form = ft.closed_form_dx()
    shifted = form + exact_oneform(ft.surface, np.sin(2 * ft.x + ft.y))
    cg1 = build_circulation_graph(ft.surface, field, form)
    cg2 = build_circulation_graph(ft.surface, field, shifted)
    for arc in cg1.graph.arcs:
        assert np.isclose(cg1.circulation.tail_limit(arc.id),
                          cg2.circulation.tail_limit(arc.id), atol=1e-10)
        assert np.isclose(cg1.circulation.head_limit(arc.id),
                          cg2.circulation.head_limit(arc.id), atol=1e-10)


def test_circulation_detects_winding_shift(torus_two_band):
    # c dx changes mid-band circulations by +-2 pi c, nothing else
    ft, field = torus_two_band
    base = ft.closed_form_dy() * 0.3
    shifted = base + ft.closed_form_dx()
    graph, qmap = build_reeb(ft.surface, field)
    for arc in graph.arcs:
        t = safe_level(field.values, 0.5 * (arc.f_lo + arc.f_hi), arc.f_hi)
        c0 = circulation_from_oneform(qmap, base, graph.arcs[arc.id], t)
        c1 = circulation_from_oneform(qmap, shifted, graph.arcs[arc.id], t)
        delta = abs(c1 - c0)
        expect = 2 * np.pi if arc.f_lo < 0.0 < arc.f_hi else 0.0
        assert np.isclose(delta, expect, atol=1e-10)


def test_rho_matches_circulation_derivative(torus_two_band):
    # the first-moment density approximates the circulation derivative
    ft, field = torus_two_band
    # velocity form with curl equal to the field itself (Euler pairing)
    form = ft.closed_form_dx() * 0.1
    cg = build_circulation_graph(ft.surface, field, form)
    assert cg.rho_deviation >= 0.0


def test_random_graph_antiderivatives():
    rng = np.random.default_rng(7)
    for _ in range(25):
        g, dens = _random_graph(rng)
        space = antiderivative_space(g, dens)
        assert space.dimension == g.betti1
        assert space.particular.max_node_residual() < 1e-10
        for vec in space.basis:
            shifted = space.particular.offsets + vec
            from casimirkit.circulation import Antiderivative
            lam = Antiderivative(g, dens, shifted)
            assert lam.max_node_residual() < 1e-10


def _random_graph(rng, max_betti=4):
    """Random simple-Morse style graph with a zero-sum density."""
    betti = int(rng.integers(0, max_betti + 1))
    # ladder of saddles: each extra cycle adds a saddle pair with a
    # double arc; always 1 min and 1 max
    values = [0.0]
    arcs = []
    prev = 0
    v = 1
    for _ in range(betti):
        s1, s2 = v, v + 1
        values += [float(len(values)), float(len(values) + 1)]
        arcs.append((prev, s1))
        arcs.append((s1, s2))
        arcs.append((s1, s2))
        prev = s2
        v += 2
    values.append(float(len(values)))
    arcs.append((prev, v))
    g = abstract_graph(values, arcs)
    totals = rng.standard_normal(len(arcs))
    totals -= totals.sum() / len(totals)
    return g, AbstractDensity(g, totals)

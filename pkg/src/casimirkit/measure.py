"""Pushforward measure on the Reeb graph and per-arc moments.

Each triangle's area distributes over field values with a piecewise
linear density (the derivative of the classical PL sublevel-area
formula, quadratic in the level).  Clipping those density pieces to the
inter-critical intervals and routing them to arcs through the quotient
map gives an exact representation of the pushforward measure; moments
and cumulative profiles are then closed-form sums, with no sampling
error beyond roundoff.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSamples
from .surface import SADDLE


@dataclass
class EdgeMeasure:
    """Sampled view of the measure on one arc, plus its moments."""

    arc: int
    f_lo: float
    f_hi: float
    t: np.ndarray                # K sample levels, t[0]=f_lo, t[-1]=f_hi
    cumulative_area: np.ndarray  # A(t) = mu({f <= t} on the arc)
    moments: np.ndarray          # raw m_i = int f^i dmu, i = 0..N-1
    moments_rescaled: np.ndarray  # same with f-range mapped to [0, 1]


class MeasureData:
    """Exact pushforward measure: linear density pieces plus point masses.

    Piece p lives on arc ``arc[p]`` with density ``a[p] + b[p] t`` on
    ``[lo[p], hi[p]]``; flat triangles appear as point masses.
    """

    def __init__(self, graph, tri, arc, lo, hi, a, b,
                 pt_tri, pt_arc, pt_t, pt_mass):
        self.graph = graph
        self.tri = tri
        self.arc = arc
        self.lo = lo
        self.hi = hi
        self.a = a
        self.b = b
        self.pt_tri = pt_tri
        self.pt_arc = pt_arc
        self.pt_t = pt_t
        self.pt_mass = pt_mass

    @property
    def n_arcs(self):
        return len(self.graph.arcs)

    def total_mass(self):
        piece = self.a * (self.hi - self.lo) \
            + 0.5 * self.b * (self.hi ** 2 - self.lo ** 2)
        return float(piece.sum() + self.pt_mass.sum())


def build_measure(surface, values, graph, qmap):
    """Assemble the exact pushforward of the area form onto the graph."""
    tris = surface.triangles
    tv = values[tris]
    order = np.argsort(tv, axis=1)
    f1 = np.take_along_axis(tv, order, axis=1)
    f1, f2, f3 = f1[:, 0], f1[:, 1], f1[:, 2]
    area = surface.triangle_areas

    tri_l, arc_l, lo_l, hi_l, a_l, b_l = [], [], [], [], [], []
    pt_tri, pt_arc, pt_t, pt_mass = [], [], [], []

    for region in qmap.intervals:
        sel = np.flatnonzero(region.labels >= 0)
        arcs = region.comp_to_arc[region.labels[sel]]
        g1, g2, g3, ga = f1[sel], f2[sel], f3[sel], area[sel]

        flat = g3 == g1
        if flat.any():
            idx = flat & (g1 > region.f_lo) & (g1 < region.f_hi)
            pt_tri.append(sel[idx])
            pt_arc.append(arcs[idx])
            pt_t.append(g1[idx])
            pt_mass.append(ga[idx])

        # rising piece on [f1, f2], falling piece on [f2, f3]
        for p_lo, p_hi, rising in ((g1, g2, True), (g2, g3, False)):
            clo = np.maximum(p_lo, region.f_lo)
            chi = np.minimum(p_hi, region.f_hi)
            ok = (chi > clo) & ~flat & (p_hi > p_lo)
            if not ok.any():
                continue
            denom = (p_hi[ok] - p_lo[ok]) * (g3[ok] - g1[ok])
            if rising:
                b = 2.0 * ga[ok] / denom
                a = -b * p_lo[ok]
            else:
                b = -2.0 * ga[ok] / denom
                a = -b * p_hi[ok]
            tri_l.append(sel[ok])
            arc_l.append(arcs[ok])
            lo_l.append(clo[ok])
            hi_l.append(chi[ok])
            a_l.append(a)
            b_l.append(b)

    def cat(parts, dtype=float):
        if not parts:
            return np.zeros(0, dtype=dtype)
        return np.concatenate(parts)

    data = MeasureData(
        graph,
        tri=cat(tri_l, np.int64), arc=cat(arc_l, np.int64),
        lo=cat(lo_l), hi=cat(hi_l), a=cat(a_l), b=cat(b_l),
        pt_tri=cat(pt_tri, np.int64), pt_arc=cat(pt_arc, np.int64),
        pt_t=cat(pt_t), pt_mass=cat(pt_mass),
    )
    _attach_critical_flats(data, surface, values, graph, qmap, f1, f3, area)
    return data


def _attach_critical_flats(data, surface, values, graph, qmap, f1, f3, area):
    """Flat triangles sitting exactly at a node value carry point mass;
    attach each to an incident arc at the node level."""
    flat = np.flatnonzero((f3 == f1) & np.isin(f1, qmap.crit_values))
    if len(flat) == 0:
        return
    extra_tri, extra_arc, extra_t, extra_m = [], [], [], []
    node_of_value = {n.f: n for n in graph.nodes}
    for k in flat:
        node = node_of_value[float(f1[k])]
        arcs = node.in_arcs or node.out_arcs
        extra_tri.append(int(k))
        extra_arc.append(arcs[0])
        extra_t.append(float(f1[k]))
        extra_m.append(float(area[k]))
    data.pt_tri = np.concatenate([data.pt_tri, np.array(extra_tri, np.int64)])
    data.pt_arc = np.concatenate([data.pt_arc, np.array(extra_arc, np.int64)])
    data.pt_t = np.concatenate([data.pt_t, np.array(extra_t)])
    data.pt_mass = np.concatenate([data.pt_mass, np.array(extra_m)])


def _power_integrals(u0, u1, A, B, n):
    """Rows of int_{u0}^{u1} u^k (A + B u) du for k = 0..n-1."""
    k = np.arange(n)
    p0 = u0[:, None] ** (k + 1)
    p1 = u1[:, None] ** (k + 1)
    out = A[:, None] * (p1 - p0) / (k + 1)
    p0 = p0 * u0[:, None]
    p1 = p1 * u1[:, None]
    out += B[:, None] * (p1 - p0) / (k + 2)
    return out


def edge_moments(data, n=16, rescaled=False, tri_weight=None):
    """Per-arc moment table, shape (n_arcs, n).

    ``m[e, k] = int ((t - s_e) / L_e)^k  w  dmu_e`` with the affine map
    the identity for raw moments and the arc's f-range onto [0, 1] when
    ``rescaled``.  ``tri_weight`` reweights each triangle's contribution
    (used for signed vorticity-flux pushforwards).
    """
    graph = data.graph
    shift = np.zeros(data.n_arcs)
    scale = np.ones(data.n_arcs)
    if rescaled:
        for arc in graph.arcs:
            shift[arc.id] = arc.f_lo
            scale[arc.id] = arc.f_hi - arc.f_lo

    s, L = shift[data.arc], scale[data.arc]
    w = np.ones(len(data.arc)) if tri_weight is None else tri_weight[data.tri]
    u0 = (data.lo - s) / L
    u1 = (data.hi - s) / L
    A = w * L * (data.a + data.b * s)
    B = w * L * data.b * L
    table = _power_integrals(u0, u1, A, B, n)

    out = np.zeros((data.n_arcs, n))
    np.add.at(out, data.arc, table)
    if len(data.pt_mass):
        ps, pL = shift[data.pt_arc], scale[data.pt_arc]
        pw = np.ones(len(data.pt_arc)) if tri_weight is None \
            else tri_weight[data.pt_tri]
        u = ((data.pt_t - ps) / pL)[:, None] ** np.arange(n)
        np.add.at(out, data.pt_arc, (data.pt_mass * pw)[:, None] * u)
    return out


def arc_cumulative(data, arc_id, ts, tri_weight=None, f_weight=False):
    """Cumulative integral over {f <= t} on the arc, vectorized in t.

    Integrates ``w dmu`` by default; with ``f_weight`` the integrand is
    ``f w dmu`` (the signed first-moment density).
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    sel = data.arc == arc_id
    lo, hi = data.lo[sel], data.hi[sel]
    a, b = data.a[sel], data.b[sel]
    if tri_weight is not None:
        w = tri_weight[data.tri[sel]]
        a, b = a * w, b * w
    arc = data.graph.arcs[arc_id]

    if f_weight:
        def P(t):
            return 0.5 * a * t * t + b * t * t * t / 3.0
    else:
        def P(t):
            return a * t + 0.5 * b * t * t

    x = np.clip(ts[:, None], lo[None, :], hi[None, :])
    out = (P(x) - P(lo[None, :])).sum(axis=1)
    psel = data.pt_arc == arc_id
    if psel.any():
        pt, pm = data.pt_t[psel], data.pt_mass[psel]
        if tri_weight is not None:
            pm = pm * tri_weight[data.pt_tri[psel]]
        if f_weight:
            pm = pm * pt
        inner = (pt[None, :] <= ts[:, None]) & (pt[None, :] > arc.f_lo)
        out += (inner * pm[None, :]).sum(axis=1)
    return out


def pushforward_measure(surface, field, graph, qmap, K=256, N=16):
    """Sampled EdgeMeasure records for every arc (the interchange view)."""
    data = build_measure(surface, field.values, graph, qmap)
    raw = edge_moments(data, N)
    resc = edge_moments(data, N, rescaled=True)
    out = []
    for arc in graph.arcs:
        t = np.linspace(arc.f_lo, arc.f_hi, K)
        A = arc_cumulative(data, arc.id, t)
        A[0] = 0.0
        out.append(EdgeMeasure(arc=arc.id, f_lo=arc.f_lo, f_hi=arc.f_hi,
                               t=t, cumulative_area=A,
                               moments=raw[arc.id],
                               moments_rescaled=resc[arc.id]))
    return out


@dataclass
class SaddleFit:
    """Log-singularity diagnostic at one 3-valent node.

    ``eps_hat`` estimates the singularity weights of the incident arcs
    in the order (trunk, branch, branch); for a simple saddle they are
    2, -1, -1 up to fit error.
    """

    node: int
    arcs: list
    beta: np.ndarray        # fitted f*ln|f| coefficients, toward the node
    eps_hat: np.ndarray
    residual: float

    @property
    def ok(self):
        target = np.array([2.0, -1.0, -1.0])
        return bool(np.max(np.abs(self.eps_hat - target)) < 0.2)


def log_singularity_diagnostic(data, graph, node_id, n_samples=64,
                               window=0.05):
    """Fit mu([v, x]) ~ beta f ln|f| + c0 + c1 f on each arc at a saddle.

    ``f`` is the signed level offset from the node.  The trunk (the lone
    arc on its side of the node) carries twice the branch singularity
    with opposite sign, which the normalized estimates expose directly.
    """
    node = graph.nodes[node_id]
    if node.kind != SADDLE:
        raise ValueError(f"node {node_id} is not 3-valent")
    if n_samples < 8:
        raise InsufficientSamples("need at least 8 samples per arc")

    arcs = []
    for a_id in node.out_arcs:
        arcs.append((a_id, +1.0))
    for a_id in node.in_arcs:
        arcs.append((a_id, -1.0))
    # trunk first: the side with a single arc
    if len(node.out_arcs) == 1:
        arcs = [(node.out_arcs[0], +1.0)] + \
               [(a, -1.0) for a in node.in_arcs]
    else:
        arcs = [(node.in_arcs[0], -1.0)] + \
               [(a, +1.0) for a in node.out_arcs]

    c = node.f
    betas, resid = [], 0.0
    for a_id, sign in arcs:
        arc = graph.arcs[a_id]
        span = arc.f_hi - arc.f_lo
        # sample strictly inside the arc, close to the node
        h = np.linspace(0.02, window, n_samples) * span
        x = c + sign * h
        A = arc_cumulative(data, a_id, x)
        if sign > 0:
            m = A                      # mass between the node and x
        else:
            m = arc_cumulative(data, a_id, np.array([arc.f_hi]))[0] - A
        f = sign * h
        basis = np.column_stack([f * np.log(np.abs(f)), np.ones_like(f), f])
        coef, res, _, _ = np.linalg.lstsq(basis, m, rcond=None)
        betas.append(coef[0])
        scale = np.abs(m).max() + 1e-300
        resid = max(resid, float(np.sqrt(np.maximum(res, 0.0).sum()) / scale))

    beta = np.array(betas)
    # with signed f, the f ln|f| coefficient is eps_i * psi'(0) directly
    eps_raw = beta
    psi1 = np.abs(eps_raw).sum() / 4.0
    eps_hat = eps_raw / (psi1 if psi1 > 0 else 1.0)
    if eps_hat[0] < 0:
        eps_hat = -eps_hat
    return SaddleFit(node=node_id, arcs=[a for a, _ in arcs], beta=beta,
                     eps_hat=eps_hat, residual=resid)

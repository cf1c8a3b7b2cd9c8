"""Pseudo-spectral 2D Euler flow on the flat torus.

The solver evolves vorticity samples with a standard Fourier
stream-function inversion, RK4 stepping and 2/3-rule dealiasing.  Its
role here is verification: snapshots convert to (mesh, field, velocity
1-form) triples, and the graph moments and circulations computed from
them should stay constant along the flow up to discretization error.
"""

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.sparse.linalg import lsmr

from .builders import FlatTorus
from .circulation import build_circulation_graph
from .errors import CFLViolation, NonZeroMean, TopologyChange
from .oneform import DiscreteOneForm, curl_matrix
from .surface import classify_vertices


def _wavenumbers(n):
    k = np.fft.fftfreq(n, d=1.0 / n)
    kx, ky = np.meshgrid(k, k, indexing="ij")
    return kx, ky


def _dealias_mask(n):
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    cut = n / 3.0
    mx, my = np.meshgrid(k <= cut, k <= cut, indexing="ij")
    return mx & my


@dataclass
class TorusFlowState:
    """Vorticity samples F[i, j] at grid points (i h, j h), h = 2 pi / n."""

    F: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.F = np.asarray(self.F, dtype=float)
        n = self.F.shape[0]
        if self.F.shape != (n, n):
            raise ValueError("square grid required")
        mean = float(self.F.mean())
        if abs(mean) > 1e-12 * (np.abs(self.F).max() + 1e-300):
            raise NonZeroMean(f"mean vorticity {mean:g} != 0")
        # enforce the dealiased band exactly
        Fh = np.fft.fft2(self.F)
        Fh[~_dealias_mask(n)] = 0.0
        Fh[0, 0] = 0.0
        self.F = np.real(np.fft.ifft2(Fh))

    @property
    def n(self):
        return self.F.shape[0]

    @property
    def h(self):
        return 2 * np.pi / self.n


def from_modes(n, modes):
    """State from a list of Fourier modes ((kx, ky), amplitude, phase)."""
    x = np.arange(n) * (2 * np.pi / n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    F = np.zeros((n, n))
    for (kx, ky), amp, *rest in modes:
        phase = rest[0] if rest else 0.0
        F += amp * np.cos(kx * X + ky * Y + phase)
    F -= F.mean()
    return TorusFlowState(F)


def _velocity_fields(state):
    """Grid samples (u1, u2) of the incompressible velocity."""
    n = state.n
    kx, ky = _wavenumbers(n)
    k2 = kx * kx + ky * ky
    k2[0, 0] = 1.0
    Fh = np.fft.fft2(state.F)
    psi_h = -Fh / k2
    psi_h[0, 0] = 0.0
    u1 = np.real(np.fft.ifft2(-1j * ky * psi_h))
    u2 = np.real(np.fft.ifft2(1j * kx * psi_h))
    return u1, u2


def _edge_type_integrals(state, di, dj):
    """Exact line integrals of u along all edges with displacement
    (di h, dj h), indexed by the edge's starting grid point.

    Band-limited u integrates in closed form: each Fourier mode picks up
    the factor (e^{i theta} - 1) / (i theta) with theta = k . d.
    """
    n, h = state.n, state.h
    kx, ky = _wavenumbers(n)
    k2 = kx * kx + ky * ky
    k2[0, 0] = 1.0
    Fh = np.fft.fft2(state.F)
    psi_h = -Fh / k2
    psi_h[0, 0] = 0.0
    u1h = -1j * ky * psi_h
    u2h = 1j * kx * psi_h

    theta = (kx * di + ky * dj) * h
    phi = np.ones_like(theta, dtype=complex)
    nz = theta != 0.0
    phi[nz] = (np.exp(1j * theta[nz]) - 1.0) / (1j * theta[nz])
    integrand_h = (u1h * di + u2h * dj) * h * phi
    return np.real(np.fft.ifft2(integrand_h))


def velocity_from_vorticity(state, correct_curl=True):
    """Velocity samples and the induced-mesh 1-form of a vorticity state.

    Edge values start from exact line integrals of the spectral
    velocity; an optional minimum-norm correction then makes the mesh
    curl reproduce the vertex vorticity samples to roundoff, so the
    downstream pipeline sees an exactly consistent (field, form) pair.
    """
    u1, u2 = _velocity_fields(state)
    torus = FlatTorus(state.n)
    surface = torus.surface
    n = state.n

    by_type = {
        (1, 0): _edge_type_integrals(state, 1, 0),
        (0, 1): _edge_type_integrals(state, 0, 1),
        (1, 1): _edge_type_integrals(state, 1, 1),
    }
    di, dj = torus._edge_displacements()
    e = surface.edges
    iu, ju = e[:, 0] // n, e[:, 0] % n
    iv, jv = e[:, 1] // n, e[:, 1] % n
    vals = np.empty(surface.n_edges)
    for (a, b), grid in by_type.items():
        fwd = (di == a) & (dj == b)
        vals[fwd] = grid[iu[fwd], ju[fwd]]
        rev = (di == -a) & (dj == -b)
        vals[rev] = -grid[iv[rev], jv[rev]]
    form = DiscreteOneForm(surface, vals)

    if correct_curl:
        C = curl_matrix(surface)
        target = state.F.ravel()
        resid = target - C @ vals
        delta = lsmr(C, resid, atol=1e-14, btol=1e-14,
                     maxiter=20 * surface.n_edges)[0]
        form = DiscreteOneForm(surface, vals + delta)
    return u1, u2, form


def cfl_timestep(state, cfl=0.4):
    u1, u2 = _velocity_fields(state)
    umax = float(np.hypot(u1, u2).max())
    if umax == 0.0:
        return np.inf
    return cfl * state.h / umax


def _rhs(F, n, mask, kx, ky, k2):
    Fh = np.fft.fft2(F)
    Fh[~mask] = 0.0
    psi_h = -Fh / k2
    psi_h[0, 0] = 0.0
    u1 = np.real(np.fft.ifft2(-1j * ky * psi_h))
    u2 = np.real(np.fft.ifft2(1j * kx * psi_h))
    Fx = np.real(np.fft.ifft2(1j * kx * Fh))
    Fy = np.real(np.fft.ifft2(1j * ky * Fh))
    adv = u1 * Fx + u2 * Fy
    ah = np.fft.fft2(adv)
    ah[~mask] = 0.0
    return -np.real(np.fft.ifft2(ah))


def step(state, dt, cfl=0.4):
    """One RK4 step of dF/dt = -u . grad F with dealiasing."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    limit = cfl_timestep(state, cfl)
    if dt > limit * (1 + 1e-12):
        raise CFLViolation(f"dt = {dt:g} exceeds CFL limit {limit:g}")
    n = state.n
    mask = _dealias_mask(n)
    kx, ky = _wavenumbers(n)
    k2 = kx * kx + ky * ky
    k2[0, 0] = 1.0

    F = state.F
    k1 = _rhs(F, n, mask, kx, ky, k2)
    k2_ = _rhs(F + 0.5 * dt * k1, n, mask, kx, ky, k2)
    k3 = _rhs(F + 0.5 * dt * k2_, n, mask, kx, ky, k2)
    k4 = _rhs(F + dt * k3, n, mask, kx, ky, k2)
    Fn = F + dt / 6.0 * (k1 + 2 * k2_ + 2 * k3 + k4)
    Fn = Fn - Fn.mean()
    return TorusFlowState(Fn, t=state.t + dt)


def simulate(state, T, dt=None, cfl=0.4, sample_times=(), on_sample=None):
    """Advance to time T; ``on_sample`` fires at the start, at each
    interior sample time, and at T."""
    if on_sample is not None:
        on_sample(state)
    targets = sorted({t for t in sample_times if state.t < t < T}) + [T]
    for target in targets:
        while state.t < target - 1e-12:
            step_dt = dt if dt is not None else 0.9 * cfl_timestep(state, cfl)
            step_dt = min(step_dt, target - state.t)
            state = step(state, step_dt, cfl=cfl)
        if on_sample is not None:
            on_sample(state)
    return state


def energy(state):
    """Kinetic energy (1/2) int |u|^2 over the torus."""
    u1, u2 = _velocity_fields(state)
    return 0.5 * float((u1 * u1 + u2 * u2).mean()) * (2 * np.pi) ** 2


def distribution_function(state, levels):
    """Exact PL area of {F <= c} on the induced mesh for each level."""
    torus = FlatTorus(state.n)
    surface = torus.surface
    tv = state.F.ravel()[surface.triangles]
    tv = np.sort(tv, axis=1)
    f1, f2, f3 = tv[:, 0], tv[:, 1], tv[:, 2]
    A = surface.triangle_areas
    out = np.empty(len(levels))
    with np.errstate(divide="ignore", invalid="ignore"):
        for i, c in enumerate(np.asarray(levels, dtype=float)):
            frac = np.zeros(len(A))
            full = c >= f3
            frac[full] = 1.0
            mid = (c >= f2) & ~full & (f3 > f1)
            lowr = (c > f1) & (c < f2)
            frac[mid] = 1.0 - (f3[mid] - c) ** 2 / \
                ((f3[mid] - f2[mid]) * (f3[mid] - f1[mid]))
            frac[lowr] = (c - f1[lowr]) ** 2 / \
                ((f2[lowr] - f1[lowr]) * (f3[lowr] - f1[lowr]))
            out[i] = float((A * frac).sum())
    return out


def _graph_signature(graph):
    kinds = tuple(n.kind for n in graph.nodes)
    arcs = tuple(sorted((a.tail, a.head) for a in graph.arcs))
    return kinds, arcs


@dataclass
class CasimirTrace:
    times: list
    moments: list            # per sample, (n_arcs, N) aligned arc tables
    circulations: list       # per sample, per-arc (tail, head) limits
    distributions: list      # per sample, sampled area of {F <= c}
    levels: np.ndarray
    moment_drift: np.ndarray  # per moment order, max relative drift
    circulation_drift: float
    distribution_drift: float


def _aligned_arc_order(cg):
    """Canonical arc order stable across snapshots: by endpoint node
    ranks, parallel arcs by mass."""
    key = [(a.tail, a.head, cg.moments[a.id, 0], a.id) for a in cg.graph.arcs]
    return [k[-1] for k in sorted(key)]


def casimir_trace(state, T, sample_times, n_moments=8, n_levels=33):
    """Casimir report along a trajectory, with drift statistics.

    At each sample the snapshot runs through the full pipeline (mesh,
    certified field, velocity 1-form, measured Reeb graph, circulation
    function); a change of graph signature aborts with TopologyChange.
    """
    records = []

    def analyze(s):
        field = classify_vertices(FlatTorus(s.n).surface, s.F.ravel())
        _, _, form = velocity_from_vorticity(s)
        cg = build_circulation_graph(form.surface, field, form,
                                     n_moments=n_moments)
        records.append((s.t, s, cg))

    simulate(state, T, sample_times=sample_times, on_sample=analyze)

    sig0 = _graph_signature(records[0][2].graph)
    for t, _, cg in records:
        sig = _graph_signature(cg.graph)
        if sig != sig0:
            raise TopologyChange(t, sig0, sig)

    f0 = records[0][1].F
    levels = np.linspace(f0.min(), f0.max(), n_levels + 2)[1:-1]

    times, mom, circ, dist = [], [], [], []
    for t, s, cg in records:
        order = _aligned_arc_order(cg)
        times.append(t)
        mom.append(cg.moments[order])
        lims = cg.circulation.limits()
        circ.append([lims[i] for i in order])
        dist.append(distribution_function(s, levels))

    m0 = mom[0]
    scale = np.abs(m0).max(axis=0) + 1e-300
    m_drift = np.array([
        max(np.abs(m - m0)[:, k].max() / scale[k] for m in mom)
        for k in range(m0.shape[1])
    ])
    c0 = np.array(circ[0])
    c_scale = np.abs(c0).max() + 1e-300
    c_drift = max(np.abs(np.array(c) - c0).max() for c in circ) / c_scale
    d0 = dist[0]
    d_scale = d0.max() + 1e-300
    d_drift = max(np.abs(d - d0).max() for d in dist) / d_scale

    return CasimirTrace(times=times, moments=mom, circulations=circ,
                        distributions=dist, levels=levels,
                        moment_drift=m_drift, circulation_drift=float(c_drift),
                        distribution_drift=float(d_drift))

"""Hausdorff moment feasibility and density reconstruction.

A finite moment sequence on an interval is feasible when its
finite-difference transforms stay nonnegative after rescaling to [0, 1].
Reconstruction expands the underlying measure in Legendre polynomials
(whose coefficients are linear in the moments), evaluates the resulting
Stieltjes transform just off the real axis with Legendre functions of
the second kind, and reads the density off the jump across the cut.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DivergenceRisk, IllConditioned, Infeasible


@dataclass
class MomentSequence:
    """Moments m_0..m_{N-1} of a measure supported in [lo, hi]."""

    lo: float
    hi: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    @property
    def n(self):
        return len(self.values)

    def rescaled(self):
        """Moments of the affine image of the measure on [0, 1]."""
        lo, hi = self.lo, self.hi
        L = hi - lo
        m = self.values
        out = np.zeros_like(m)
        for k in range(len(m)):
            out[k] = sum(comb(k, j) * (-lo) ** (k - j) * m[j]
                         for j in range(k + 1)) / L ** k
        return out


@dataclass
class FeasibilityReport:
    feasible: bool
    min_difference: float
    violations: list        # (n, k, value) triples below -tol

    def __bool__(self):
        return self.feasible


def hausdorff_check(ms, tol_feas=None):
    """Finite-difference positivity of the [0, 1]-rescaled moments.

    Checks (-1)^n Delta^n m_k >= -tol for all orders with k + n < N;
    every genuine positive measure passes, since the combination equals
    ``int x^k (1-x)^n dmu``.
    """
    if ms.n < 2:
        raise ValueError("need at least two moments")
    m = ms.rescaled()
    if tol_feas is None:
        tol_feas = 1e-9 * max(abs(m[0]), 1e-300)
    level = m.copy()
    sign = 1.0
    worst = np.inf
    violations = []
    for order in range(ms.n):
        vals = sign * level
        worst = min(worst, float(vals.min()))
        for k, v in enumerate(vals):
            if v < -tol_feas:
                violations.append((order, k, float(v)))
        if len(level) == 1:
            break
        level = level[1:] - level[:-1]
        sign = -sign
    return FeasibilityReport(feasible=not violations,
                             min_difference=worst, violations=violations)


@dataclass
class StieltjesValue:
    value: complex
    tail_bound: float


def stieltjes_transform(ms, lam, L=None, density=None):
    """Phi(lambda) = int dmu(z) / (lambda - z), as a truncated series.

    Series mode sums m_k / lambda^(k+1) with the geometric remainder
    bound from |m_k| <= C L^k; it diverges on |lambda| <= L.  With a
    sampled ``density`` (z, w) the transform is integrated directly and
    is valid for any lambda off the support.
    """
    if L is None:
        L = max(abs(ms.lo), abs(ms.hi))
    lam = complex(lam)
    if density is not None:
        z, w = density
        val = np.trapezoid(w / (lam - z), z)
        return StieltjesValue(value=complex(val), tail_bound=0.0)
    r = abs(lam)
    if r <= L:
        raise DivergenceRisk(
            f"|lambda| = {r:g} inside the support radius L = {L:g}")
    k = np.arange(ms.n)
    with np.errstate(over="ignore"):
        C = float(np.max(np.abs(ms.values) / L ** k))
    val = np.sum(ms.values / lam ** (k + 1))
    tail = C * (L / r) ** ms.n / (r - L)
    return StieltjesValue(value=complex(val), tail_bound=float(tail))


def _legendre_coefficients(ms, L):
    """c_k with dmu/dz ~ sum c_k P_k(z / L) from the raw moments."""
    n = ms.n
    c = np.zeros(n)
    for k in range(n):
        # P_k(x) = sum_j p_j x^j; int P_k(z/L) dmu = sum_j p_j m_j / L^j
        p = np.polynomial.legendre.leg2poly([0.0] * k + [1.0])
        acc = sum(p[j] * ms.values[j] / L ** j for j in range(k + 1))
        c[k] = (2 * k + 1) / (2 * L) * acc
    return c


def _legendre_q(y, n):
    """Q_0..Q_{n-1} at complex argument y (off the cut [-1, 1])."""
    q = np.zeros(n, dtype=complex)
    q[0] = 0.5 * np.log((y + 1) / (y - 1))
    if n > 1:
        q[1] = y * q[0] - 1.0
    for k in range(1, n - 1):
        q[k + 1] = ((2 * k + 1) * y * q[k] - k * q[k - 1]) / (k + 1)
    return q


@dataclass
class Reconstruction:
    grid: np.ndarray
    density: np.ndarray
    defect: float           # relative mass defect against m0
    eps: float


def reconstruct_density(ms, L=None, eps=None, grid=201, tol_defect=0.2):
    """Density on (-L, L) from the jump of the Stieltjes transform.

    Evaluates ``w(x) = (Phi(x - i eps) - Phi(x + i eps)) / (2 pi i)``
    with Phi built from the Legendre expansion of the moments (stable in
    N, unlike resummation of the raw power series).  The recovered mass
    is compared with m0 and a defect above ``tol_defect`` raises
    :class:`IllConditioned`.
    """
    report = hausdorff_check(ms)
    if not report:
        raise Infeasible(
            f"moment sequence fails Hausdorff check: {report.violations[:3]}")
    if L is None:
        L = max(abs(ms.lo), abs(ms.hi))
    if eps is None:
        eps = 1e-2 * L
    x = np.linspace(-L, L, grid + 2)[1:-1]
    c = _legendre_coefficients(ms, L)
    w = np.empty(len(x))
    for i, xi in enumerate(x):
        qm = _legendre_q((xi - 1j * eps) / L, ms.n)
        qp = _legendre_q((xi + 1j * eps) / L, ms.n)
        # Phi = 2 sum_k c_k Q_k(lambda / L)
        jump = 2.0 * np.sum(c * (qm - qp))
        w[i] = (jump / (2j * np.pi)).real
    mass = float(np.trapezoid(w, x))
    defect = abs(mass - ms.values[0]) / max(abs(ms.values[0]), 1e-300)
    if defect > tol_defect:
        raise IllConditioned(defect, ms.n, eps)
    return Reconstruction(grid=x, density=w, defect=defect, eps=eps)

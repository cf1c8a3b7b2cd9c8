"""Discrete 1-forms on mesh edges, their exterior derivative and curl.

Edge values represent a coset representative of a velocity 1-form; the
per-triangle boundary sum divided by area is the vorticity density, and
Whitney interpolation gives line integrals along level polylines that
vanish exactly on exact forms.
"""

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import lsmr


class DiscreteOneForm:
    """Real value per oriented mesh edge, antisymmetric under reversal.

    ``values[e]`` is the integral along ``edges[e]`` traversed from the
    lower-index to the higher-index endpoint.
    """

    def __init__(self, surface, values):
        self.surface = surface
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (surface.n_edges,):
            raise ValueError("one value per mesh edge required")

    def __add__(self, other):
        if isinstance(other, DiscreteOneForm):
            if other.surface is not self.surface:
                raise ValueError("one-forms live on different surfaces")
            return DiscreteOneForm(self.surface, self.values + other.values)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, DiscreteOneForm):
            return DiscreteOneForm(self.surface, self.values - other.values)
        return NotImplemented

    def __mul__(self, scalar):
        return DiscreteOneForm(self.surface, self.values * float(scalar))

    __rmul__ = __mul__

    def value(self, u, v):
        """Integral along the directed edge u -> v."""
        e = self.surface.edge_index(u, v)
        return self.values[e] if u < v else -self.values[e]


def _side_signs(surface):
    """Sign of each triangle side relative to canonical edge direction."""
    t = surface.triangles
    de = np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1)  # (T,3,2)
    return np.where(de[:, :, 0] < de[:, :, 1], 1.0, -1.0)


def exterior_derivative(form):
    """Per-triangle oriented boundary sum of the 1-form."""
    s = form.surface
    signs = _side_signs(s)
    return (signs * form.values[s._tri_edge]).sum(axis=1)


def exact_oneform(surface, f):
    """The discrete differential of a vertex function: d f."""
    f = np.asarray(f, dtype=float)
    e = surface.edges
    return DiscreteOneForm(surface, f[e[:, 1]] - f[e[:, 0]])


def curl(surface, form):
    """Vorticity function of a 1-form coset: d(alpha)/omega at vertices.

    Per-triangle densities are averaged to vertices with one third of
    each incident triangle's area as weight; the area-weighted mean of
    the result vanishes identically.
    """
    flux = exterior_derivative(form)
    density = flux / surface.triangle_areas
    num = np.zeros(surface.n_vertices)
    den = np.zeros(surface.n_vertices)
    w = surface.triangle_areas / 3.0
    for k in range(3):
        np.add.at(num, surface.triangles[:, k], w * density)
        np.add.at(den, surface.triangles[:, k], w)
    return num / den


def vertex_areas(surface):
    """Barycentric area weights used by :func:`curl`."""
    den = np.zeros(surface.n_vertices)
    w = surface.triangle_areas / 3.0
    for k in range(3):
        np.add.at(den, surface.triangles[:, k], w)
    return den


def curl_matrix(surface):
    """Sparse operator mapping edge values to vertex curl values."""
    s = surface
    signs = _side_signs(s)
    inv_area = 1.0 / s.triangle_areas
    den = vertex_areas(s)
    rows, cols, vals = [], [], []
    w = s.triangle_areas / 3.0
    for k in range(3):
        vert = s.triangles[:, k]
        coef = (w * inv_area) / den[vert]       # weight of triangle flux at vertex
        for side in range(3):
            rows.append(vert)
            cols.append(s._tri_edge[:, side])
            vals.append(coef * signs[:, side])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    return coo_matrix((vals, (rows, cols)), shape=(s.n_vertices, s.n_edges)).tocsr()


def oneform_with_vorticity(surface, triangle_flux, base=None, tol=1e-13):
    """A 1-form whose exterior derivative equals the given per-triangle flux.

    Solves the underdetermined linear system in the minimum-norm sense
    (starting from ``base`` when given).  Requires the total flux to
    vanish up to roundoff.
    """
    flux = np.asarray(triangle_flux, dtype=float)
    total = flux.sum()
    scale = np.abs(flux).sum() + 1e-300
    if abs(total) > 1e-9 * scale:
        raise ValueError(f"total flux {total:g} is not zero; no primitive exists")
    s = surface
    signs = _side_signs(s)
    rows = np.repeat(np.arange(len(s.triangles)), 3)
    cols = s._tri_edge.ravel()
    vals = signs.ravel()
    D = coo_matrix((vals, (rows, cols)), shape=(len(s.triangles), s.n_edges)).tocsr()
    rhs = flux.copy()
    base_vals = np.zeros(s.n_edges) if base is None else base.values
    rhs = flux - D @ base_vals
    sol = lsmr(D, rhs, atol=tol, btol=tol, maxiter=10 * s.n_edges)[0]
    return DiscreteOneForm(s, base_vals + sol)


def segment_integral(form, tri_index, bary_from, bary_to):
    """Whitney line integral across one triangle between barycentric points."""
    s = form.surface
    tri = s.triangles[tri_index]
    b = np.asarray(bary_from, dtype=float)
    d = np.asarray(bary_to, dtype=float) - b
    total = 0.0
    # sides (0,1), (1,2), (2,0) in local coordinates
    for i, j in ((0, 1), (1, 2), (2, 0)):
        a = form.value(int(tri[i]), int(tri[j]))
        total += a * (b[i] * d[j] - b[j] * d[i])
    return total


def cycle_integral(form, cycle):
    """Integral of the 1-form along an oriented level cycle.

    ``cycle`` is a :class:`~casimirkit.reeb.LevelCycle`; the integral is
    the sum of Whitney segment integrals through its triangles and is
    exactly invariant under adding an exact form.
    """
    s = form.surface
    n = len(cycle.tri)
    total = 0.0
    for k in range(n):
        t = int(cycle.tri[k])
        b0 = _crossing_bary(s, t, cycle.edge_u[k], cycle.edge_v[k], cycle.frac[k])
        k1 = (k + 1) % n
        b1 = _crossing_bary(s, t, cycle.edge_u[k1], cycle.edge_v[k1], cycle.frac[k1])
        total += segment_integral(form, t, b0, b1)
    return total


def _crossing_bary(surface, tri_index, u, v, frac):
    tri = surface.triangles[tri_index]
    b = np.zeros(3)
    iu = int(np.flatnonzero(tri == u)[0])
    iv = int(np.flatnonzero(tri == v)[0])
    b[iu] = 1.0 - frac
    b[iv] = frac
    return b

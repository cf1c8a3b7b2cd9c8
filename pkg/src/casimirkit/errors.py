"""Exception hierarchy for the casimir-kit pipeline."""


class CasimirKitError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CasimirKitError):
    """A mesh, field or form document could not be parsed."""


class CountMismatch(CasimirKitError):
    """Vertex/triangle counts of companion documents disagree."""


class NonManifoldError(CasimirKitError):
    """A mesh edge is not shared by exactly two triangles."""


class OrientationError(CasimirKitError):
    """Triangle orientations are not globally consistent."""


class NotSimple(CasimirKitError):
    """The scalar field is not a certified simple Morse field."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"field is not simple Morse: {report}")


class PerturbFailure(CasimirKitError):
    """Value perturbation cannot repair the field (degenerate saddle)."""


class OutOfRange(CasimirKitError):
    """A level parameter lies outside the valid open interval."""


class NoSolution(CasimirKitError):
    """The density has nonzero total mass, so no antiderivative exists."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"density does not sum to zero (residual={residual:g})")


class BadPinPlacement(CasimirKitError):
    """Pin points do not cut every independent cycle exactly once."""


class Infeasible(CasimirKitError):
    """Constraints admit no solution (inconsistent pins, or a moment
    sequence that cannot come from a positive measure)."""


class AntiderivativeViolation(CasimirKitError):
    """A sampled circulation function fails the antiderivative checks."""

    def __init__(self, where, residual, tol):
        self.where = where
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"antiderivative violation at {where}: residual {residual:g} > tol {tol:g}"
        )


class InsufficientSamples(CasimirKitError):
    """Too few profile samples near a node for an asymptotic fit."""


class DivergenceRisk(CasimirKitError):
    """Moment series evaluated inside its divergence region."""


class IllConditioned(CasimirKitError):
    """Moment inversion left a defect beyond the acceptable budget."""

    def __init__(self, defect, n_moments, eps):
        self.defect = defect
        self.n_moments = n_moments
        self.eps = eps
        super().__init__(
            f"reconstruction defect {defect:.3f} with N={n_moments}, eps={eps:g}"
        )


class NonZeroMean(CasimirKitError):
    """A vorticity field has nonzero mean and admits no stream function."""


class CFLViolation(CasimirKitError):
    """Requested time step exceeds the advective CFL limit."""


class TopologyChange(CasimirKitError):
    """The Reeb graph signature changed along a simulated trajectory."""

    def __init__(self, t, before, after):
        self.t = t
        self.before = before
        self.after = after
        super().__init__(f"Reeb graph signature changed at t={t:g}: {before} -> {after}")

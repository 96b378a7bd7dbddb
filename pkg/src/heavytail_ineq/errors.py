"""Exception hierarchy shared by every module."""


class HeavyTailError(Exception):
    """Base class for all library errors."""


class ComputeError(HeavyTailError):
    """A numerical computation could not be completed."""


class ConfigError(HeavyTailError, ValueError):
    """Invalid run configuration (bad flags, sweep ranges, unknown ids)."""


class ParameterOutOfRange(HeavyTailError, ValueError):
    """Parameters outside the admissible range of a family or theorem."""


class DomainError(HeavyTailError, ValueError):
    """Evaluation point outside the closure of the model interval."""


class CatalogUnknown(ConfigError, KeyError):
    """Unknown inequality catalog id."""


class QuadratureFailure(ComputeError):
    """Adaptive integration exhausted its budget before meeting tolerance.

    ``partial`` holds the best estimate reached, when there is one, with an
    error bound that is honest but above the requested tolerance.
    """

    def __init__(self, message: str = "", partial=None):
        super().__init__(message)
        self.partial = partial


class NonFiniteIntegrand(QuadratureFailure):
    """The integrand returned NaN or infinity at an interior node."""


class DivergentIntegral(QuadratureFailure):
    """Tail probes show the integrand is not integrable at an infinite end."""


class ConvergenceFailure(ComputeError):
    """An iterative root finder did not converge."""


class AdmissibilityError(ComputeError):
    """A Fokker-Planck model violates the drift hypotheses of a theorem."""


class ConvexityLost(ParameterOutOfRange):
    """The transformed potential is no longer uniformly convex."""


class EigenSolveFailure(ComputeError):
    """The shift-invert eigensolver failed to converge."""


class MassDeficit(ComputeError):
    """A truncated grid does not carry enough probability mass."""


class StabilityFailure(ComputeError):
    """A PDE run produced negative cell averages beyond tolerance."""


class GridMismatch(HeavyTailError, ValueError):
    """Two grid functions do not live on the same grid."""


class InsufficientDecay(ComputeError):
    """An entropy trace never entered the fitting window."""


class VerificationFailure(HeavyTailError):
    """At least one non-vacuous inequality check failed."""

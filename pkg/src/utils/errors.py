"""Exceptions raised by the rate-check pipeline."""


class RateCheckError(Exception):
    """Base class for every failure raised by this package."""


class CoefficientFloorError(RateCheckError):
    """Raised when diffusion or the zeroth-order weight drops below the floor m0."""


class DimensionError(RateCheckError):
    """Raised when a nodal vector does not match the mesh."""


class AssemblyInvariantError(RateCheckError):
    """Raised when an assembled operator violates symmetry, kernel or definiteness."""


class NumericalFailureError(RateCheckError):
    """Raised when a linear-algebra kernel fails to meet its residual bound."""

    def __init__(self, message: str, residual: float | None = None) -> None:
        super().__init__(message)
        self.residual = residual


class ContourCollisionError(RateCheckError):
    """Raised when an eigenvalue sits on the Riesz contour."""


class QuadratureResolutionError(RateCheckError):
    """Raised when contour quadrature disagrees with the eigen-expansion projector."""


class DomainError(RateCheckError):
    """Raised when an argument lies outside the admissible region."""


class DegeneracyError(RateCheckError):
    """Raised when a generator has (numerically) zero norm."""


class ProjectionError(RateCheckError):
    """Raised when a vector expected in the fast space has a slow component."""


class HyperbolicityError(RateCheckError):
    """Raised when an equilibrium has a vanishing linearization margin."""


class NonConvergenceError(RateCheckError):
    """Raised when an iteration does not reach its tolerance."""


class BlowupError(RateCheckError):
    """Raised when the reaction term overflows or produces NaN."""


class EscapeError(RateCheckError):
    """Raised when a trajectory leaves the dissipative ball."""


class RangeError(RateCheckError):
    """Raised when a reduced coordinate lies outside the section grid."""


class InsufficientDataError(RateCheckError):
    """Raised when a rate fit has fewer usable rows than required."""


class SweepAbortedError(RateCheckError):
    """Raised when a hard failure stops a sweep at a given epsilon."""

    def __init__(self, eps: float, cause: Exception) -> None:
        super().__init__(f"sweep aborted at eps={eps:.17g}: {cause}")
        self.eps = eps
        self.cause = cause


class ConfigError(RateCheckError, ValueError):
    """Raised for unreadable, unknown or invalid configuration entries."""

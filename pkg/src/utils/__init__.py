"""Shared toolings for the rate-check packages."""

from .async_utils import gather_with_progress, rate_limited, run_in_threads
from .errors import (
    AssemblyInvariantError,
    BlowupError,
    CoefficientFloorError,
    ConfigError,
    ContourCollisionError,
    DegeneracyError,
    DimensionError,
    DomainError,
    EscapeError,
    HyperbolicityError,
    InsufficientDataError,
    NonConvergenceError,
    NumericalFailureError,
    ProjectionError,
    QuadratureResolutionError,
    RangeError,
    RateCheckError,
    SweepAbortedError,
)
from .logging import set_up_logging
from .pretty_printing import pretty_print

"""Rate series and log-log least-squares fits against the composite rate."""

from dataclasses import dataclass, field

import numpy as np
import pydantic

from ..utils.errors import DomainError, InsufficientDataError


NOISE_FLOOR = 1e-13
MIN_ROWS = 4


@dataclass(frozen=True, slots=True)
class Row:
    """One epsilon of a sweep; ``flag`` is empty unless a soft failure occurred."""

    eps: float
    delta: float
    error: float
    flag: str = ""


@dataclass(frozen=True)
class RateSeries:
    """Rows of one quantity ordered by strictly decreasing epsilon."""

    quantity: str
    rows: list[Row] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Check ordering and signs."""
        eps = self.eps
        if np.any(np.diff(eps) >= 0.0):
            raise DomainError(f"{self.quantity}: eps must be strictly decreasing")
        finite = self.error[np.isfinite(self.error)]
        if np.any(finite < 0.0) or np.any(self.delta <= 0.0):
            raise DomainError(f"{self.quantity}: negative error or delta")

    @property
    def eps(self) -> np.ndarray:
        """Epsilon column."""
        return np.array([row.eps for row in self.rows])

    @property
    def delta(self) -> np.ndarray:
        """Composite rate column."""
        return np.array([row.delta for row in self.rows])

    @property
    def error(self) -> np.ndarray:
        """Measured error column."""
        return np.array([row.error for row in self.rows])

    @property
    def flags(self) -> list[str]:
        """Non-empty flags, prefixed with their epsilon."""
        return [f"eps={row.eps:g}: {row.flag}" for row in self.rows if row.flag]


class FitResult(pydantic.BaseModel):
    """log E = slope * log delta + intercept, with R^2 and the slope criterion."""

    slope: float
    intercept: float
    r_squared: float
    n_rows: int
    passed: bool

    @property
    def constant(self) -> float:
        """C = exp(intercept)."""
        return float(np.exp(self.intercept))


def fit_rate(series: RateSeries, slope_floor: float = 0.9) -> FitResult:
    """Least-squares slope of log E against log delta.

    Rows with non-finite E or E <= 1e-13 are left out; the fit needs at
    least four remaining rows.
    """
    error, delta = series.error, series.delta
    usable = np.isfinite(error) & (error > NOISE_FLOOR)
    n_rows = int(np.count_nonzero(usable))
    if n_rows < MIN_ROWS:
        raise InsufficientDataError(
            f"{series.quantity}: {n_rows} usable rows, need {MIN_ROWS}"
        )

    x, y = np.log(delta[usable]), np.log(error[usable])
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    spread = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - float(np.sum(residual**2)) / spread if spread > 0.0 else 1.0
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        n_rows=n_rows,
        passed=bool(slope >= slope_floor),
    )

"""Reaction terms f with their derivative and dissipativity margin."""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..utils.errors import BlowupError, DomainError


ScalarMap = Callable[[np.ndarray], np.ndarray]

DERIVATIVE_TOL = 1e-6
DERIVATIVE_STEP = 1e-5


@dataclass(frozen=True)
class Reaction:
    """f, f' and a dissipativity margin: f(u)/u <= -margin for |u| >= radius."""

    name: str
    f: ScalarMap = field(repr=False)
    df: ScalarMap = field(repr=False)
    radius: float
    margin: float

    def __post_init__(self) -> None:
        """Check f' against central differences and the margin at +-radius."""
        grid = np.linspace(-3.0, 3.0, 21)
        h = DERIVATIVE_STEP
        central = (self.f(grid + h) - self.f(grid - h)) / (2.0 * h)
        worst = float(np.max(np.abs(central - self.df(grid))))
        if worst > DERIVATIVE_TOL:
            raise DomainError(f"{self.name}: f' disagrees with f by {worst:.3e}")

        if not self.margin > 0.0:
            raise DomainError(f"{self.name}: dissipativity margin must be positive")

        edges = np.array([-self.radius, self.radius])
        ratios = self.f(edges) / edges
        if np.any(ratios > -self.margin + 1e-12 * max(1.0, self.margin)):
            raise DomainError(
                f"{self.name}: f(u)/u = {ratios} at +-{self.radius}, "
                f"expected <= {-self.margin}"
            )

    def __call__(self, u: np.ndarray) -> np.ndarray:
        """f applied nodewise; overflow or NaN raises ``BlowupError``."""
        try:
            with np.errstate(over="raise", invalid="raise"):
                out = self.f(np.asarray(u, dtype=float))
        except FloatingPointError as e:
            raise BlowupError(f"{self.name} overflowed: {e}") from e

        if not np.all(np.isfinite(out)):
            raise BlowupError(f"{self.name} returned non-finite values")
        return out

    def derivative(self, u: np.ndarray) -> np.ndarray:
        """f' applied nodewise."""
        return self.df(np.asarray(u, dtype=float))


def cubic(gain: float = 1.0) -> Reaction:
    """f(u) = gain * u - u^3."""
    return Reaction(
        name=f"cubic(gain={gain:g})",
        f=lambda u: gain * u - u**3,
        df=lambda u: gain - 3.0 * u**2,
        radius=float(np.sqrt(max(gain, 0.0) + 1.0)),
        margin=1.0,
    )


def linear(rate: float = -0.25) -> Reaction:
    """f(u) = rate * u, dissipative for rate < 0."""
    if rate >= 0.0:
        raise DomainError(f"linear reaction needs a negative rate, got {rate}")

    return Reaction(
        name=f"linear(rate={rate:g})",
        f=lambda u: rate * u,
        df=lambda u: rate + 0.0 * u,
        radius=1.0,
        margin=-rate,
    )

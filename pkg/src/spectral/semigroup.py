"""Linear semigroup estimates on the slow and fast spaces, by eigen-expansion."""

from dataclasses import dataclass

import numpy as np

from ..utils.errors import DomainError, ProjectionError
from .eigen import SpectralDecomposition


DECAY_BOUND = 1.0 + 1e-6
DECAY_TIMES = np.linspace(0.1, 2.0, 20)
SLOW_ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True, slots=True)
class DecayReport:
    """(t, ratio) samples of a semigroup bound; the bound holds iff ratio <= limit."""

    times: np.ndarray
    ratios: np.ndarray
    limit: float = DECAY_BOUND

    @property
    def max_ratio(self) -> float:
        """Largest sampled ratio."""
        return float(np.max(self.ratios))

    @property
    def passed(self) -> bool:
        """All ratios within the bound."""
        return bool(self.max_ratio <= self.limit)


def semigroup_decay_check(
    dec: SpectralDecomposition, t_samples: np.ndarray | None, z: np.ndarray
) -> DecayReport:
    """||e^{-A t} z||_energy e^{lambda_2 t} / ||z||_energy for z in the fast space.

    The flow is evaluated on the computed modes; the energy norm of a mode
    expansion sum c_j phi_j is sqrt(sum lambda_j c_j^2). ``None`` samples
    twenty times evenly in (0, 2].
    """
    t_samples = DECAY_TIMES if t_samples is None else np.asarray(t_samples, float)
    if np.any(t_samples <= 0.0):
        raise DomainError("fast-space decay is checked for t > 0 only")
    if dec.k < 2:
        raise DomainError("fast-space decay needs at least two modes")

    z = dec.op.mesh.check_nodal(z)
    coeffs = dec.coefficients(z)
    z_l2 = float(np.sqrt(max(z @ dec.op.M @ z, 0.0)))
    if abs(coeffs[0]) > SLOW_ORTHOGONALITY_TOL * max(z_l2, 1.0):
        raise ProjectionError(
            f"z has slow component {coeffs[0]:.3e}; project it onto Z first"
        )

    values = dec.eigenvalues[1:]
    fast = coeffs[1:]
    z_energy = float(np.sqrt(max(z @ dec.op.G @ z, 0.0)))
    beta = dec.eigenvalues[1]

    # Scaled by e^{beta t} inside the exponent to avoid underflow.
    decay = np.exp(-np.outer(t_samples, values - beta))
    flowed = np.sqrt(np.sum(values * fast**2 * decay**2, axis=1))
    return DecayReport(times=t_samples, ratios=flowed / z_energy)


@dataclass(frozen=True, slots=True)
class SlowFlowReport:
    """Backward slow-space growth ratios and the scalar backward comparison."""

    times: np.ndarray
    growth_ratios: np.ndarray
    backward_gap: float

    @property
    def passed(self) -> bool:
        """Growth ratios never exceed one."""
        return bool(np.max(self.growth_ratios) <= DECAY_BOUND)


def slow_semigroup_check(
    dec: SpectralDecomposition, center: float, t_samples: np.ndarray | None = None
) -> SlowFlowReport:
    """Slow-space estimates for t <= 0 with gamma = center + 1.

    ``growth_ratios`` is e^{-lambda_1 t} e^{gamma t}, the bound on
    Y_eps with M = 1. ``backward_gap`` is max over t in [-1, 0] of
    |e^{-lambda_1 t} - e^{-center t}|, comparing the perturbed and the limit
    slow flows.
    """
    t_samples = (
        np.linspace(-1.0, 0.0, 21) if t_samples is None else np.asarray(t_samples)
    )
    if np.any(t_samples > 0.0):
        raise DomainError("slow-space estimates are checked for t <= 0 only")

    lam1 = float(dec.eigenvalues[0])
    gamma = center + 1.0
    growth = np.exp((gamma - lam1) * t_samples)
    grid = np.linspace(-1.0, 0.0, 201)
    backward_gap = float(np.max(np.abs(np.exp(-lam1 * grid) - np.exp(-center * grid))))
    return SlowFlowReport(
        times=t_samples, growth_ratios=growth, backward_gap=backward_gap
    )

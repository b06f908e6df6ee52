"""Exponential Euler time stepping in the eigenbasis of the operator.

With u = sum_j c_j phi_j one step of size dt reads

    c_j <- exp(-lambda_j dt) c_j + (1 - exp(-lambda_j dt)) / lambda_j * f_j,

f_j = phi_j^T M f(u), the first-order discretization of the variation of
constants formula. The linear part is exact.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..discretization import DiscreteOperator
from ..spectral import SpectralDecomposition, full_decomposition
from ..utils.errors import DomainError
from .reaction import Reaction


logger = logging.getLogger(__name__)

DEFAULT_DT_MAX = 0.1


@dataclass(frozen=True)
class ModalBasis:
    """All eigenpairs of (G, M); phi_1 spans Y, the remaining modes span Z."""

    dec: SpectralDecomposition

    @classmethod
    def of(cls, op: DiscreteOperator) -> "ModalBasis":
        """Full decomposition of ``op``."""
        return cls(dec=full_decomposition(op))

    @property
    def op(self) -> DiscreteOperator:
        """The decomposed operator."""
        return self.dec.op

    @property
    def eigenvalues(self) -> np.ndarray:
        """All eigenvalues, ascending."""
        return self.dec.eigenvalues

    @property
    def vectors(self) -> np.ndarray:
        """M-orthonormal eigenvectors as columns."""
        return self.dec.eigenvectors

    @property
    def slow_mode(self) -> np.ndarray:
        """phi_1."""
        return self.dec.slow_mode

    def coefficients(self, u: np.ndarray) -> np.ndarray:
        """Modal coefficients; rows of a 2-D ``u`` are states."""
        if u.ndim == 2:
            return (u @ self.op.M) @ self.vectors
        return self.dec.coefficients(u)

    def synthesize(self, c: np.ndarray) -> np.ndarray:
        """Nodal states from modal coefficients (rows if 2-D)."""
        return c @ self.vectors.T

    def split(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(v, z) with u = v phi_1 + z and z M-orthogonal to phi_1."""
        v = u @ (self.op.M @ self.slow_mode)
        return v, u - np.multiply.outer(v, self.slow_mode)


def _check_dt(dt: float, dt_max: float) -> None:
    if not 0.0 < dt <= dt_max:
        raise DomainError(f"dt={dt} must lie in (0, {dt_max}]")


def _phi_weights(values: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """exp(-lambda dt) and (1 - exp(-lambda dt)) / lambda."""
    return np.exp(-values * dt), -np.expm1(-values * dt) / values


def step(
    op: DiscreteOperator,
    reaction: Reaction,
    u: np.ndarray,
    dt: float,
    basis: ModalBasis | None = None,
    dt_max: float = DEFAULT_DT_MAX,
) -> np.ndarray:
    """One exponential Euler step from the nodal state ``u``."""
    _check_dt(dt, dt_max)
    basis = ModalBasis.of(op) if basis is None else basis
    u = op.mesh.check_nodal(u)

    decay, gain = _phi_weights(basis.eigenvalues, dt)
    c = basis.coefficients(u)
    forcing = basis.coefficients(reaction(u))
    return basis.synthesize(decay * c + gain * forcing)


@dataclass(frozen=True, slots=True)
class Trajectory:
    """States (rows) at the recorded times."""

    times: np.ndarray
    states: np.ndarray

    @property
    def final(self) -> np.ndarray:
        """Last recorded state."""
        return self.states[-1]


def integrate(
    op: DiscreteOperator,
    reaction: Reaction,
    u0: np.ndarray,
    t_final: float,
    dt: float,
    basis: ModalBasis | None = None,
    dt_max: float = DEFAULT_DT_MAX,
    record_every: int = 1,
) -> Trajectory:
    """Repeated ``step`` up to ``t_final``, which must be a multiple of ``dt``.

    Parameters
    ----------
    op : DiscreteOperator
        Assembled operator.
    reaction : Reaction
        Nonlinearity applied nodewise.
    u0 : np.ndarray
        Initial nodal state.
    t_final : float
        End time.
    dt : float
        Step size, at most ``dt_max``.
    basis : ModalBasis | None
        Reused decomposition; computed when omitted.
    record_every : int
        Keep every ``record_every``-th state (the final state is always kept).

    Returns
    -------
    Trajectory
        Recorded times and states, starting with ``u0``.
    """
    _check_dt(dt, dt_max)
    n_steps = int(round(t_final / dt))
    if n_steps < 1 or abs(n_steps * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise DomainError(f"t_final={t_final} is not a positive multiple of dt={dt}")

    basis = ModalBasis.of(op) if basis is None else basis
    decay, gain = _phi_weights(basis.eigenvalues, dt)

    u = op.mesh.check_nodal(u0).astype(float)
    c = basis.coefficients(u)
    times, states = [0.0], [u]
    for k in range(1, n_steps + 1):
        c = decay * c + gain * basis.coefficients(reaction(u))
        u = basis.synthesize(c)
        if k % record_every == 0 or k == n_steps:
            times.append(k * dt)
            states.append(u)

    logger.debug("integrated %d steps of dt=%.3g", n_steps, dt)
    return Trajectory(times=np.array(times), states=np.array(states))

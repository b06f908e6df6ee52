"""Generalized eigenpairs of the pencil (G, M) and quantities read off them."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..discretization import DiscreteOperator
from ..utils.errors import DomainError, NumericalFailureError


logger = logging.getLogger(__name__)

EIGEN_RESIDUAL_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-10


@dataclass(frozen=True)
class SpectralDecomposition:
    """The k smallest eigenpairs of (G, M), eigenvectors M-orthonormal by column.

    The first eigenvector is signed so that its mean is positive; every other
    eigenvector so that its largest-magnitude entry is positive.
    """

    op: DiscreteOperator
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def k(self) -> int:
        """Number of computed modes."""
        return self.eigenvalues.size

    @property
    def slow_mode(self) -> np.ndarray:
        """phi_1, spanning the slow space."""
        return self.eigenvectors[:, 0]

    def coefficients(self, u: np.ndarray) -> np.ndarray:
        """phi_j^T M u for every computed mode (columns of ``u`` if 2-D)."""
        return self.eigenvectors.T @ (self.op.M @ u)


def _fix_signs(values: np.ndarray, vectors: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Deterministic signs: positive mean for phi_1, positive peak otherwise."""
    vectors = vectors.copy()
    for j in range(values.size):
        if j == 0:
            reference = float(np.sum(m @ vectors[:, 0]))
        else:
            reference = float(vectors[np.argmax(np.abs(vectors[:, j])), j])
        if reference < 0.0:
            vectors[:, j] *= -1.0
    return vectors


def eigensolve(op: DiscreteOperator, k: int) -> SpectralDecomposition:
    """Compute the ``k`` smallest eigenpairs of (G, M), sorted ascending.

    Parameters
    ----------
    op : DiscreteOperator
        Assembled operator.
    k : int
        Number of modes, at most the number of nodes.

    Returns
    -------
    SpectralDecomposition
        Residual, orthonormality and coercivity floor verified.
    """
    if not 1 <= k <= op.n:
        raise DomainError(f"k={k} must lie in [1, {op.n}]")

    try:
        values, vectors = scipy.linalg.eigh(op.G, op.M, subset_by_index=[0, k - 1])
    except np.linalg.LinAlgError as e:
        raise NumericalFailureError(f"eigh did not converge: {e}") from e

    vectors = _fix_signs(values, vectors, op.M)

    g_norm = np.linalg.norm(op.G, ord=np.inf)
    m_norm = np.linalg.norm(op.M, ord=np.inf)
    residuals = op.G @ vectors - (op.M @ vectors) * values
    scale = (g_norm + np.abs(values) * m_norm) * np.linalg.norm(vectors, axis=0)
    worst = float(np.max(np.linalg.norm(residuals, axis=0) / scale))
    if worst > EIGEN_RESIDUAL_TOL:
        raise NumericalFailureError(
            f"eigenpair backward error {worst:.3e} too large", residual=worst
        )

    gram = vectors.T @ op.M @ vectors
    if np.max(np.abs(gram - np.eye(k))) > ORTHONORMALITY_TOL:
        raise NumericalFailureError("eigenvectors are not M-orthonormal")

    if values[0] < op.coeff.floor * (1.0 - 1e-10):
        raise NumericalFailureError(
            f"lambda_1={values[0]:.6g} below the floor m0={op.coeff.floor}"
        )

    return SpectralDecomposition(op=op, eigenvalues=values, eigenvectors=vectors)


def full_decomposition(op: DiscreteOperator) -> SpectralDecomposition:
    """All eigenpairs of (G, M)."""
    return eigensolve(op, op.n)


def eigenvalue_gap(dec: SpectralDecomposition, center: float) -> float:
    """|lambda_1 - center|, the convergence of the first eigenvalue."""
    return float(abs(dec.eigenvalues[0] - center))


def spectrum_separation(
    dec: SpectralDecomposition, center: float, radius: float | None = None
) -> bool:
    """True iff |lambda_1 - center| <= R < lambda_2, with R = 2 + center by default."""
    if dec.k < 2:
        raise DomainError("spectrum separation needs at least two modes")

    radius = 2.0 + center if radius is None else radius
    return bool(
        abs(dec.eigenvalues[0] - center) <= radius and dec.eigenvalues[1] > radius
    )


def eigen_projector(
    op: DiscreteOperator, center: float, radius: float
) -> tuple[np.ndarray, np.ndarray]:
    """Sum of phi_j phi_j^T M over eigenvalues with |lambda_j - center| < radius.

    Returns
    -------
    tuple[np.ndarray, np.ndarray]
        (projector matrix, enclosed eigenvalues)
    """
    all_values = scipy.linalg.eigh(op.G, op.M, eigvals_only=True)
    inside = np.flatnonzero(np.abs(all_values - center) < radius)
    if inside.size == 0:
        return np.zeros((op.n, op.n)), inside.astype(float)

    values, vectors = scipy.linalg.eigh(
        op.G, op.M, subset_by_index=[int(inside[0]), int(inside[-1])]
    )
    return vectors @ vectors.T @ op.M, values

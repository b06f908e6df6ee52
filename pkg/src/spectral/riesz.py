"""Spectral projection by trapezoidal quadrature of the resolvent on a circle.

The projection onto the eigenvalues of A = M^{-1} G inside |z - c| = r is

    Q = (1 / 2 pi i) oint (z - A)^{-1} dz = (1 / 2 pi i) oint (z M - G)^{-1} M dz,

which is the same projector as integrating (xi + A)^{-1} around -c. With
z_k = c + r exp(i theta_k) the trapezoid rule reads
Q ~ (1/n) sum_k (z_k - c) (z_k M - G)^{-1} M, geometrically convergent in n.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..discretization import DiscreteOperator
from ..utils.errors import ContourCollisionError, DomainError, QuadratureResolutionError
from .eigen import eigen_projector, eigensolve


logger = logging.getLogger(__name__)

COLLISION_TOL = 1e-8
AGREEMENT_TOL = 1e-6
IDEMPOTENCE_TOL = 1e-8


@dataclass(frozen=True)
class RieszProjection:
    """Quadrature projector Q together with the contour that produced it."""

    matrix: np.ndarray
    center: float
    radius: float
    n_quad: int
    enclosed: np.ndarray

    @property
    def rank(self) -> int:
        """Number of eigenvalues inside the contour."""
        return self.enclosed.size

    def singular_values(self, op: DiscreteOperator) -> np.ndarray:
        """Singular values of Q as an operator on (R^n, M)."""
        chol = scipy.linalg.cholesky(op.M, lower=True)
        weighted = chol.T @ self.matrix @ np.linalg.inv(chol.T)
        return scipy.linalg.svdvals(weighted)


def contour_points(
    center: float, radius: float, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes z_k = c + r e^{i theta_k} and weights (z_k - c) / n.

    The angles are offset by half a step so that no node lies on the real axis.
    """
    theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    offsets = radius * np.exp(1j * theta)
    return center + offsets, offsets / n


def default_radius(op: DiscreteOperator, center: float) -> float:
    """0.5 * min(center - m0 + 1, lambda_2 - center)."""
    dec = eigensolve(op, min(2, op.n))
    gap = dec.eigenvalues[-1] - center if dec.k > 1 else np.inf
    return 0.5 * float(min(center - op.coeff.floor + 1.0, gap))


def riesz_projection(
    op: DiscreteOperator,
    center: float,
    radius: float | None = None,
    n_quad: int = 32,
    check: bool = True,
) -> RieszProjection:
    """Approximate the spectral projection for eigenvalues inside |z - center| = radius.

    Parameters
    ----------
    op : DiscreteOperator
        Assembled operator.
    center : float
        Circle center on the real axis (the limit eigenvalue lambda + V0).
    radius : float | None
        Circle radius; ``default_radius`` when omitted.
    n_quad : int
        Even number of trapezoid nodes.
    check : bool
        Compare against the eigen-expansion projector and test idempotence.

    Returns
    -------
    RieszProjection
        Real projector matrix acting on nodal vectors.
    """
    if n_quad <= 0 or n_quad % 2:
        raise DomainError(f"n_quad must be a positive even integer, got {n_quad}")

    radius = default_radius(op, center) if radius is None else radius
    if radius <= 0.0:
        raise DomainError(f"contour radius must be positive, got {radius}")

    all_values = scipy.linalg.eigh(op.G, op.M, eigvals_only=True)
    distance = np.abs(np.abs(all_values - center) - radius)
    if np.any(distance <= COLLISION_TOL * np.maximum(1.0, np.abs(all_values))):
        raise ContourCollisionError(
            f"eigenvalue on the contour |z - {center}| = {radius}"
        )

    nodes, weights = contour_points(center, radius, n_quad)
    q = np.zeros((op.n, op.n), dtype=complex)
    for z, weight in zip(nodes, weights):
        q += weight * op.shifted_solve(z, op.M)

    matrix = q.real
    reference, enclosed = eigen_projector(op, center, radius)

    if check:
        scale = max(1.0, np.linalg.norm(reference, ord=2))
        disagreement = np.linalg.norm(matrix - reference, ord=2) / scale
        if disagreement > AGREEMENT_TOL:
            raise QuadratureResolutionError(
                f"quadrature and eigen-expansion projectors differ by"
                f" {disagreement:.3e} with n_quad={n_quad}"
            )

        idempotence = np.linalg.norm(matrix @ matrix - matrix, ord=2) / scale
        if idempotence > IDEMPOTENCE_TOL:
            raise QuadratureResolutionError(f"||Q^2 - Q|| = {idempotence:.3e}")

    logger.debug(
        "riesz projection: center=%.4g radius=%.4g rank=%d",
        center,
        radius,
        enclosed.size,
    )
    return RieszProjection(
        matrix=matrix,
        center=center,
        radius=radius,
        n_quad=n_quad,
        enclosed=enclosed,
    )

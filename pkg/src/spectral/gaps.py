"""Operator-norm gaps between the perturbed and the limit problem.

Every gap is the exact discrete norm of a matrix E mapping nodal vectors,
measured from (R^n, M), the L^2 geometry, into (R^n, G), the energy geometry:

    ||E|| = sqrt(lambda_max(E^H G E, M)).
"""

import logging

import numpy as np
import scipy.linalg

from ..discretization import AveragingProjection, DiscreteOperator, h1_gram
from ..utils.errors import DegeneracyError, DomainError, NumericalFailureError
from .eigen import SpectralDecomposition
from .riesz import RieszProjection


logger = logging.getLogger(__name__)

PENCIL_TOL = 1e-12
DEFAULT_SECTOR_ANGLE = 0.75 * np.pi


def operator_norm(
    matrix: np.ndarray, target: np.ndarray, source: np.ndarray
) -> float:
    """Norm of ``matrix`` from (R^n, source) into (R^n, target)."""
    pencil = matrix.conj().T @ target @ matrix
    pencil = 0.5 * (pencil + pencil.conj().T)
    try:
        values = scipy.linalg.eigh(pencil, source, eigvals_only=True)
    except np.linalg.LinAlgError as e:
        raise NumericalFailureError(f"pencil eigensolve failed: {e}") from e

    scale = max(1.0, float(np.max(np.abs(values))))
    if values[0] < -PENCIL_TOL * scale:
        raise NumericalFailureError(
            f"pencil (E^T G E, M) is indefinite: {values[0]:.3e}",
            residual=float(values[0]),
        )
    return float(np.sqrt(max(values[-1], 0.0)))


def resolvent_difference(
    op: DiscreteOperator,
    limit: float,
    proj: AveragingProjection,
    mu: complex = 0.0,
) -> np.ndarray:
    """Matrix of (mu + A_eps)^{-1} - (mu + A_0)^{-1} P on nodal vectors.

    ``limit`` is lambda + V0, the value of A_0 on constants.
    """
    if mu == 0.0:
        perturbed = op.solve(op.M)
        limit_factor = 1.0 / limit
    else:
        # (mu M + G)^{-1} M = -(z M - G)^{-1} M with z = -mu.
        perturbed = -op.shifted_solve(-mu, op.M)
        limit_factor = 1.0 / (mu + limit)
    return perturbed - limit_factor * proj.matrix()


def resolvent_gap(
    op: DiscreteOperator, limit: float, proj: AveragingProjection
) -> float:
    """||A_eps^{-1} - A_0^{-1} P|| from L^2 into the energy space."""
    return operator_norm(resolvent_difference(op, limit, proj), op.G, op.M)


def in_sector(
    mu: complex,
    limit: float,
    radius: float,
    angle: float = DEFAULT_SECTOR_ANGLE,
) -> bool:
    """True iff |mu + limit| >= radius and |arg(mu + limit)| <= angle."""
    shifted = complex(mu) + limit
    return bool(abs(shifted) >= radius and abs(np.angle(shifted)) <= angle)


def sector_samples(
    limit: float,
    rho: float | None = None,
    n: int = 8,
    angle: float = DEFAULT_SECTOR_ANGLE,
) -> np.ndarray:
    """n points -limit + rho e^{i theta}, theta evenly spread over [-angle, angle]."""
    rho = limit if rho is None else rho
    theta = np.linspace(-angle, angle, n)
    return -limit + rho * np.exp(1j * theta)


def sector_resolvent_gap(
    op: DiscreteOperator,
    limit: float,
    proj: AveragingProjection,
    mu: complex,
    radius: float | None = None,
    angle: float = DEFAULT_SECTOR_ANGLE,
) -> float:
    """||(mu + A_eps)^{-1} - (mu + A_0)^{-1} P|| for mu in the sector around -limit."""
    radius = 0.5 * limit if radius is None else radius
    if not in_sector(mu, limit, radius, angle):
        raise DomainError(
            f"mu={mu} is outside the sector |arg(mu + {limit})| <= {angle:.4g},"
            f" |mu + {limit}| >= {radius:.4g}"
        )

    return operator_norm(resolvent_difference(op, limit, proj, mu=mu), op.G, op.M)


def projection_gap(
    q: RieszProjection, proj: AveragingProjection, op: DiscreteOperator
) -> float:
    """||Q_eps - P|| from L^2 into the energy space."""
    return operator_norm(q.matrix - proj.matrix(), op.G, op.M)


def slow_semigroup_gap(
    dec: SpectralDecomposition,
    proj: AveragingProjection,
    center: float,
    t_samples: np.ndarray | None = None,
) -> float:
    """max over t <= 0 of ||e^{-A_eps t} Q_eps - e^{-center t} P||, L^2 -> energy.

    Q_eps is phi_1 phi_1^T M, so the backward slow flow is e^{-lambda_1 t} Q_eps.
    Defaults to 21 times evenly spaced in [-1, 0].
    """
    t_samples = (
        np.linspace(-1.0, 0.0, 21) if t_samples is None else np.asarray(t_samples)
    )
    if np.any(t_samples > 0.0):
        raise DomainError("the slow semigroup gap is measured for t <= 0 only")

    op = dec.op
    slow = np.outer(dec.slow_mode, op.M @ dec.slow_mode)
    limit = proj.matrix()
    lam1 = float(dec.eigenvalues[0])
    return max(
        operator_norm(
            np.exp(-lam1 * t) * slow - np.exp(-center * t) * limit, op.G, op.M
        )
        for t in t_samples
    )


def _segment_distance(
    points: np.ndarray, generator: np.ndarray, gram: np.ndarray
) -> np.ndarray:
    """Energy distance from each row of ``points`` to {s * generator : |s| <= 1}."""
    generator_sq = float(generator @ gram @ generator)
    s = np.clip(points @ gram @ generator / generator_sq, -1.0, 1.0)
    diff = points - np.outer(s, generator)
    return np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", diff, gram, diff), 0.0))


def eigenspace_hausdorff(
    dec: SpectralDecomposition,
    op: DiscreteOperator,
    proj: AveragingProjection,
    n_samples: int = 65,
) -> float:
    """Hausdorff distance between the unit segments of span(phi_1) and constants.

    Both generators are normalized in the energy norm of ``op``; each segment
    is sampled at ``n_samples`` parameters in [-1, 1] including endpoints, and
    the distance to the other segment is computed exactly.
    """
    gram = op.G
    ones = proj.apply(np.ones(op.n))
    generators = []
    for vec in (dec.slow_mode, ones):
        size = float(np.sqrt(max(vec @ gram @ vec, 0.0)))
        if size < 1e-14:
            raise DegeneracyError("eigenspace generator has zero energy norm")
        generators.append(vec / size)

    phi_hat, one_hat = generators
    t = np.linspace(-1.0, 1.0, n_samples)
    forward = _segment_distance(np.outer(t, phi_hat), one_hat, gram).max()
    backward = _segment_distance(np.outer(t, one_hat), phi_hat, gram).max()
    return float(forward + backward)


def norm_ratio_probe(op: DiscreteOperator) -> float:
    """sup_u ||u||^2_energy / ||u||^2_{H^1}, the largest eigenvalue of (G, H)."""
    values = scipy.linalg.eigh(
        op.G, h1_gram(op.mesh), eigvals_only=True, subset_by_index=[op.n - 1, op.n - 1]
    )
    return float(values[0])

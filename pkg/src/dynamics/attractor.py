"""Attractor samples and their Hausdorff distances in the energy norm."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist

from ..discretization import AveragingProjection, DiscreteOperator, IntervalMesh
from ..spectral import RieszProjection
from ..utils.errors import DimensionError, DomainError, RangeError
from .equilibria import Equilibrium
from .manifold import GraphSection


@dataclass(frozen=True, slots=True)
class AttractorSample:
    """Finite sample of a one-dimensional attractor, points as rows."""

    points: np.ndarray
    v_lo: float
    v_hi: float

    def __post_init__(self) -> None:
        """Reject empty samples."""
        if self.points.ndim != 2 or self.points.shape[0] == 0:
            raise DomainError("attractor sample must hold at least one point")

    def mapped(self, matrix: np.ndarray) -> "AttractorSample":
        """Image of every point under the linear map ``matrix``."""
        return AttractorSample(
            points=self.points @ matrix.T, v_lo=self.v_lo, v_hi=self.v_hi
        )


def attractor_sample(
    s: GraphSection, equilibria: list[Equilibrium], n_pts: int = 65
) -> AttractorSample:
    """Points v phi_1 + s(v) for v uniform between the extremal equilibria.

    The endpoints are the extremal equilibria themselves, so the sample
    closes exactly on them rather than on their graph approximation.
    """
    basis = s.basis
    n = basis.op.n
    states = [eq.nodal(n) for eq in equilibria]
    reduced = np.array([float(basis.split(u)[0]) for u in states])
    lo, hi = int(np.argmin(reduced)), int(np.argmax(reduced))
    v_lo, v_hi = reduced[lo], reduced[hi]
    if v_lo < s.v_grid[0] or v_hi > s.v_grid[-1]:
        raise RangeError(
            f"equilibria span [{v_lo:.6g}, {v_hi:.6g}], outside the section grid"
            f" [{s.v_grid[0]:.6g}, {s.v_grid[-1]:.6g}]"
        )

    v = np.linspace(v_lo, v_hi, n_pts)
    points = np.multiply.outer(v, basis.slow_mode) + s.evaluate(v)
    points[0], points[-1] = states[lo], states[hi]
    return AttractorSample(points=points, v_lo=float(v_lo), v_hi=float(v_hi))


def limit_attractor_sample(
    equilibria: list[Equilibrium], mesh: IntervalMesh, n_pts: int = 65
) -> AttractorSample:
    """Constants between the extremal roots of the limit problem."""
    roots = [float(eq.value) for eq in equilibria]
    values = np.linspace(min(roots), max(roots), n_pts)
    return AttractorSample(
        points=np.multiply.outer(values, np.ones(mesh.n_nodes)),
        v_lo=min(roots),
        v_hi=max(roots),
    )


@dataclass(frozen=True, slots=True)
class HausdorffReport:
    """One-sided distances and their sum d_H."""

    dist_ab: float
    dist_ba: float

    @property
    def d_h(self) -> float:
        """dist_ab + dist_ba."""
        return self.dist_ab + self.dist_ba


def hausdorff(
    a: AttractorSample, b: AttractorSample, op: DiscreteOperator
) -> HausdorffReport:
    """Brute-force Hausdorff components in the energy norm of ``op``.

    With G = L L^T, ||x||_G = ||L^T x||, so Euclidean distances between the
    transformed rows give energy distances.
    """
    for sample in (a, b):
        if sample.points.shape[1] != op.n:
            raise DimensionError(
                f"sample points have {sample.points.shape[1]} entries, mesh has {op.n}"
            )

    chol = scipy.linalg.cholesky(op.G, lower=True)
    dist = cdist(a.points @ chol, b.points @ chol)
    return HausdorffReport(
        dist_ab=float(dist.min(axis=1).max()), dist_ba=float(dist.min(axis=0).max())
    )


@dataclass(frozen=True, slots=True)
class AttractorGapReport:
    """d_H between the perturbed and the limit attractor, with the triangle legs.

    The legs compare the perturbed sample with its spectral projection, that
    projection with its average, and the average with the limit sample.
    """

    total: HausdorffReport
    legs: tuple[float, float, float]

    @property
    def value(self) -> float:
        """d_H of the perturbed and limit samples."""
        return self.total.d_h


def attractor_gap(
    op: DiscreteOperator,
    s: GraphSection,
    equilibria: list[Equilibrium],
    limit_equilibria: list[Equilibrium],
    q: RieszProjection,
    proj: AveragingProjection,
    n_pts: int = 65,
) -> AttractorGapReport:
    """Hausdorff gap of the attractors and its attribution along Q and P."""
    perturbed = attractor_sample(s, equilibria, n_pts)
    limit = limit_attractor_sample(limit_equilibria, op.mesh, n_pts)
    projected = perturbed.mapped(q.matrix)
    averaged = projected.mapped(proj.matrix())

    legs = (
        hausdorff(perturbed, projected, op).d_h,
        hausdorff(projected, averaged, op).d_h,
        hausdorff(averaged, limit, op).d_h,
    )
    return AttractorGapReport(total=hausdorff(perturbed, limit, op), legs=legs)

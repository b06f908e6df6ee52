"""One-dimensional meshes and the element-midpoint coefficient fields on them."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..utils.errors import CoefficientFloorError, DimensionError, DomainError


Profile = Callable[[np.ndarray], np.ndarray]


def _frozen(values: np.ndarray) -> np.ndarray:
    """Return a read-only float copy."""
    out = np.array(values, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, slots=True)
class IntervalMesh:
    """Partition a = x_0 < x_1 < ... < x_N = b of the interval (a, b)."""

    a: float
    b: float
    nodes: np.ndarray

    def __post_init__(self) -> None:
        """Validate ordering and endpoints."""
        nodes = _frozen(self.nodes)
        object.__setattr__(self, "nodes", nodes)

        if nodes.ndim != 1 or nodes.size < 2:
            raise DomainError("mesh needs at least one element")
        if not (self.b > self.a):
            raise DomainError(f"empty interval ({self.a}, {self.b})")
        if nodes[0] != self.a or nodes[-1] != self.b:
            raise DomainError("first/last node must equal the interval endpoints")
        if np.any(np.diff(nodes) <= 0.0):
            raise DomainError("nodes must be strictly increasing")

        total = float(np.sum(np.diff(nodes)))
        if abs(total - (self.b - self.a)) > 1e-12 * (self.b - self.a):
            raise DomainError("element lengths do not add up to b - a")

    @classmethod
    def uniform(cls, n_elems: int, a: float = 0.0, b: float = 1.0) -> "IntervalMesh":
        """Build the uniform mesh with ``n_elems`` elements."""
        if n_elems < 1:
            raise DomainError(f"n_elems must be positive, got {n_elems}")

        nodes = np.linspace(a, b, n_elems + 1)
        nodes[0], nodes[-1] = a, b
        return cls(a=a, b=b, nodes=nodes)

    @property
    def n_elems(self) -> int:
        """Number of elements."""
        return self.nodes.size - 1

    @property
    def n_nodes(self) -> int:
        """Number of nodes, i.e. the size of every nodal vector."""
        return self.nodes.size

    @property
    def length(self) -> float:
        """Measure |Omega| of the interval."""
        return self.b - self.a

    @property
    def h(self) -> np.ndarray:
        """Element lengths."""
        return np.diff(self.nodes)

    @property
    def midpoints(self) -> np.ndarray:
        """Element midpoints, where coefficients are sampled."""
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    def interpolate(self, fn: Profile) -> np.ndarray:
        """Nodal interpolant of ``fn``."""
        return np.asarray(fn(self.nodes), dtype=float) * np.ones(self.n_nodes)

    def check_nodal(self, u: np.ndarray) -> np.ndarray:
        """Return ``u`` as a float array, raising if it is not one value per node."""
        arr = np.asarray(u)
        if arr.shape[-1] != self.n_nodes:
            raise DimensionError(
                f"expected {self.n_nodes} nodal values, got shape {arr.shape}"
            )
        return arr


@dataclass(frozen=True, slots=True)
class CoefficientField:
    """Diffusion p, potential V, shift lambda and floor m0 on a mesh.

    ``diffusion`` and ``potential`` hold one value per element, sampled at
    the element midpoints; the assembly is exact for elementwise constant data.
    """

    diffusion: np.ndarray
    potential: np.ndarray
    shift: float
    floor: float

    def __post_init__(self) -> None:
        """Check the positivity floor on both coefficients."""
        object.__setattr__(self, "diffusion", _frozen(self.diffusion))
        object.__setattr__(self, "potential", _frozen(self.potential))

        if self.diffusion.shape != self.potential.shape:
            raise DimensionError("diffusion and potential sizes differ")
        if not self.floor > 0.0:
            raise CoefficientFloorError(f"floor m0 must be positive, got {self.floor}")
        if not np.all(np.isfinite(self.diffusion)) or not np.all(
            np.isfinite(self.potential)
        ):
            raise CoefficientFloorError("coefficients must be finite")

        p_min = float(np.min(self.diffusion))
        if p_min < self.floor:
            raise CoefficientFloorError(
                f"min diffusion {p_min:.6g} is below the floor m0={self.floor:.6g}"
            )

        q_min = float(np.min(self.reaction_weight))
        if q_min < self.floor:
            raise CoefficientFloorError(
                f"min (lambda + V) {q_min:.6g} is below the floor m0={self.floor:.6g}"
            )

    @classmethod
    def from_profiles(
        cls,
        mesh: IntervalMesh,
        diffusion: Profile,
        potential: Profile,
        shift: float,
        floor: float,
    ) -> "CoefficientField":
        """Sample ``diffusion`` and ``potential`` at the element midpoints."""
        mids = mesh.midpoints
        ones = np.ones_like(mids)
        return cls(
            diffusion=np.asarray(diffusion(mids), dtype=float) * ones,
            potential=np.asarray(potential(mids), dtype=float) * ones,
            shift=float(shift),
            floor=float(floor),
        )

    @classmethod
    def constant(
        cls, mesh: IntervalMesh, p: float, v0: float, shift: float, floor: float
    ) -> "CoefficientField":
        """Constant diffusion ``p`` and potential ``v0``."""
        return cls.from_profiles(
            mesh, lambda x: p + 0.0 * x, lambda x: v0 + 0.0 * x, shift, floor
        )

    @property
    def reaction_weight(self) -> np.ndarray:
        """Elementwise lambda + V."""
        return self.shift + self.potential


def midpoint_lp_norm(mesh: IntervalMesh, fn: Profile, power: float = 1.0) -> float:
    """(sum_e h_e |fn(m_e)|^power)^(1/power), the midpoint rule for the L^p norm."""
    values = np.abs(np.asarray(fn(mesh.midpoints), dtype=float))
    return float(np.sum(mesh.h * values**power) ** (1.0 / power))

"""The averaging projection P u = (1/|Omega|) int u onto constants."""

from dataclasses import dataclass

import numpy as np

from .mesh import IntervalMesh


@dataclass(frozen=True, slots=True)
class AveragingProjection:
    """Weights w with w . u equal to the mean of the P1 interpolant of u."""

    mesh: IntervalMesh
    weights: np.ndarray

    @classmethod
    def on(cls, mesh: IntervalMesh) -> "AveragingProjection":
        """Trapezoid weights (h_{i-1} + h_i) / (2 |Omega|), exact for P1 functions."""
        h = mesh.h
        w = np.zeros(mesh.n_nodes)
        w[:-1] += 0.5 * h
        w[1:] += 0.5 * h
        w /= mesh.length
        w.setflags(write=False)
        return cls(mesh=mesh, weights=w)

    def apply(self, u: np.ndarray) -> np.ndarray:
        """P u as a nodal vector (constant)."""
        return average(u, self) * np.ones(self.mesh.n_nodes)

    def matrix(self) -> np.ndarray:
        """Dense matrix 1 w^T of P acting on nodal vectors."""
        return np.outer(np.ones(self.mesh.n_nodes), self.weights)


def average(u: np.ndarray, proj: AveragingProjection) -> float:
    """Mean value (1/|Omega|) int u of the piecewise-linear interpolant of ``u``."""
    u = proj.mesh.check_nodal(u)
    return float(proj.weights @ u)

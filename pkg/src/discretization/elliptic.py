"""Neumann elliptic solve and the norms of the energy sandwich."""

from typing import Literal

import numpy as np

from ..utils.errors import AssemblyInvariantError
from .assembly import SOLVE_TOL, DiscreteOperator, h1_gram


NormKind = Literal["energy", "h1", "l2"]


def backward_error(matrix: np.ndarray, x: np.ndarray, rhs: np.ndarray) -> float:
    """||A x - b|| / (||A|| ||x|| + ||b||), the normwise backward error."""
    residual = np.linalg.norm(matrix @ x - rhs)
    scale = np.linalg.norm(matrix, ord=np.inf) * np.linalg.norm(x) + np.linalg.norm(
        rhs
    )
    return float(residual / scale) if scale > 0 else 0.0


def solve_elliptic(op: DiscreteOperator, g: np.ndarray) -> np.ndarray:
    """Galerkin solution of -(p u')' + (lambda + V) u = g with Neumann conditions.

    Parameters
    ----------
    op : DiscreteOperator
        Assembled operator.
    g : np.ndarray
        Nodal values of the right-hand side (interpolated into P1).

    Returns
    -------
    np.ndarray
        Nodal vector u with G u = M g.
    """
    g = op.mesh.check_nodal(g)
    rhs = op.M @ g
    u = op.solve(rhs)

    err = backward_error(op.G, u, rhs)
    if err > SOLVE_TOL:
        raise AssemblyInvariantError(f"elliptic solve backward error {err:.3e}")

    return u


def quadratic_form(matrix: np.ndarray, u: np.ndarray) -> float:
    """u^T A u, rejecting negative values beyond round-off."""
    value = float(u @ matrix @ u)
    if value < -1e-14 * max(1.0, float(np.abs(u) @ np.abs(matrix) @ np.abs(u))):
        raise AssemblyInvariantError(f"quadratic form is negative: {value:.3e}")
    return max(value, 0.0)


def norm(u: np.ndarray, op: DiscreteOperator, which: NormKind = "energy") -> float:
    """Energy, H^1 or L^2 norm of the P1 function with nodal values ``u``."""
    u = op.mesh.check_nodal(u)
    if which == "energy":
        matrix = op.G
    elif which == "h1":
        matrix = h1_gram(op.mesh)
    elif which == "l2":
        matrix = op.M
    else:
        raise ValueError(f"unknown norm {which!r}; expected energy, h1 or l2")

    return float(np.sqrt(quadratic_form(matrix, u)))

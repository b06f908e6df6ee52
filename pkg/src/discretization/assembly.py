"""Piecewise-linear Galerkin assembly of the Neumann operator family.

For u, v in the continuous P1 space on the mesh,

    S[i, j] = int p u_j' u_i',   W[i, j] = int (lambda + V) u_j u_i,
    M[i, j] = int u_j u_i,       G = S + W,

so that u^T G u is the squared norm of u in the energy space of the operator
and u -> G^{-1} M g is the discrete resolvent at zero.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse

from ..utils.errors import (
    AssemblyInvariantError,
    DimensionError,
    NumericalFailureError,
)
from .mesh import CoefficientField, IntervalMesh


logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
KERNEL_TOL = 1e-12
SOLVE_TOL = 1e-10


def _tridiagonal(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    """Dense symmetric tridiagonal matrix from its diagonal and off-diagonal."""
    return scipy.sparse.diags([off, diag, off], offsets=[-1, 0, 1]).toarray()


def _stiffness_bands(mesh: IntervalMesh, weight: np.ndarray):
    """Diagonals of sum_e weight_e / h_e [[1, -1], [-1, 1]]."""
    local = weight / mesh.h
    diag = np.zeros(mesh.n_nodes)
    diag[:-1] += local
    diag[1:] += local
    return diag, -local


def _mass_bands(mesh: IntervalMesh, weight: np.ndarray):
    """Diagonals of sum_e weight_e h_e / 6 [[2, 1], [1, 2]]."""
    local = weight * mesh.h / 6.0
    diag = np.zeros(mesh.n_nodes)
    diag[:-1] += 2.0 * local
    diag[1:] += 2.0 * local
    return diag, local


def _upper_band(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    """Upper banded storage for ``scipy.linalg.solveh_banded``."""
    ab = np.zeros((2, diag.size), dtype=np.result_type(diag, off))
    ab[0, 1:] = off
    ab[1, :] = diag
    return ab


def _full_band(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    """(1, 1) banded storage for ``scipy.linalg.solve_banded``."""
    ab = np.zeros((3, diag.size), dtype=np.result_type(diag, off))
    ab[0, 1:] = off
    ab[1, :] = diag
    ab[2, :-1] = off
    return ab


@dataclass(frozen=True)
class DiscreteOperator:
    """Stiffness, potential, mass and energy Gram matrices of one operator.

    Immutable after assembly; safe to share between threads. Every solve
    builds its own factorization.
    """

    mesh: IntervalMesh
    coeff: CoefficientField
    S: np.ndarray
    W: np.ndarray
    M: np.ndarray
    _bands: dict[str, tuple[np.ndarray, np.ndarray]] = field(repr=False)

    @property
    def G(self) -> np.ndarray:  # noqa: N802
        """Energy Gram matrix S + W."""
        return self.S + self.W

    @property
    def n(self) -> int:
        """Number of nodal unknowns."""
        return self.mesh.n_nodes

    def band(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        """(diagonal, off-diagonal) of ``S``, ``W``, ``M`` or ``G``."""
        return self._bands[name]

    def apply(self, u: np.ndarray) -> np.ndarray:
        """G u, with the stiffness part evaluated in flux form.

        Differences of neighbouring values are formed first, so nearly
        constant u does not lose digits against the large diffusion.
        """
        flux = self.coeff.diffusion / self.mesh.h * np.diff(u, axis=0).T
        su = np.zeros(u.shape[::-1])
        su[..., :-1] -= flux
        su[..., 1:] += flux

        w_diag, w_off = self.band("W")
        wu = w_diag * u.T
        wu[..., :-1] += w_off * u[1:].T
        wu[..., 1:] += w_off * u[:-1].T
        return (su + wu).T

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve G x = rhs (one or several right-hand sides) by banded Cholesky."""
        diag, off = self.band("G")
        try:
            return scipy.linalg.solveh_banded(_upper_band(diag, off), rhs)
        except np.linalg.LinAlgError as e:
            raise AssemblyInvariantError("G is not positive definite") from e

    def shifted_solve(self, z: complex, rhs: np.ndarray) -> np.ndarray:
        """Solve (z M - G) x = rhs for a complex shift ``z`` by banded LU."""
        g_diag, g_off = self.band("G")
        m_diag, m_off = self.band("M")
        ab = _full_band(z * m_diag - g_diag, z * m_off - g_off)
        try:
            return scipy.linalg.solve_banded((1, 1), ab, np.asarray(rhs, complex))
        except np.linalg.LinAlgError as e:
            raise NumericalFailureError(f"zM - G is singular at z={z}") from e

    def smallest_eigenvalue(self) -> float:
        """Smallest eigenvalue of the pencil (G, M)."""
        values = scipy.linalg.eigh(
            self.G, self.M, eigvals_only=True, subset_by_index=[0, 0]
        )
        return float(values[0])


def _check_invariants(op: DiscreteOperator) -> None:
    """Symmetry, Neumann kernel and coercivity floor of an assembled operator."""
    for name in ("S", "W", "M"):
        mat = getattr(op, name)
        scale = max(np.linalg.norm(mat, ord=np.inf), 1.0)
        if np.max(np.abs(mat - mat.T)) > SYMMETRY_TOL * scale:
            raise AssemblyInvariantError(f"{name} is not symmetric")

    kernel = np.linalg.norm(op.S @ np.ones(op.n))
    if kernel > KERNEL_TOL * np.linalg.norm(op.S, ord=np.inf):
        raise AssemblyInvariantError(f"S * 1 = {kernel:.3e}, constants not in kernel")

    lam_min = op.smallest_eigenvalue()
    if lam_min < op.coeff.floor * (1.0 - 1e-10):
        raise AssemblyInvariantError(
            f"smallest eigenvalue {lam_min:.6g} of (G, M) below m0={op.coeff.floor}"
        )


def assemble(
    mesh: IntervalMesh, coeff: CoefficientField, check: bool = True
) -> DiscreteOperator:
    """Assemble the P1 Galerkin matrices of -(p u')' + (lambda + V) u.

    Parameters
    ----------
    mesh : IntervalMesh
        Partition of the interval.
    coeff : CoefficientField
        Elementwise coefficients; the floor is validated on construction.
    check : bool
        Verify symmetry, the Neumann kernel and the coercivity floor.

    Returns
    -------
    DiscreteOperator
        Dense matrices plus their tridiagonal bands.
    """
    if coeff.diffusion.size != mesh.n_elems:
        raise DimensionError(
            f"{coeff.diffusion.size} coefficient values for {mesh.n_elems} elements"
        )

    s_bands = _stiffness_bands(mesh, coeff.diffusion)
    w_bands = _mass_bands(mesh, coeff.reaction_weight)
    m_bands = _mass_bands(mesh, np.ones(mesh.n_elems))
    g_bands = (s_bands[0] + w_bands[0], s_bands[1] + w_bands[1])

    op = DiscreteOperator(
        mesh=mesh,
        coeff=coeff,
        S=_tridiagonal(*s_bands),
        W=_tridiagonal(*w_bands),
        M=_tridiagonal(*m_bands),
        _bands={"S": s_bands, "W": w_bands, "M": m_bands, "G": g_bands},
    )
    if check:
        _check_invariants(op)

    logger.debug(
        "assembled operator: N=%d, min p=%.4g, min(lambda+V)=%.4g",
        mesh.n_elems,
        coeff.diffusion.min(),
        coeff.reaction_weight.min(),
    )
    return op


def h1_gram(mesh: IntervalMesh) -> np.ndarray:
    """Gram matrix of the H^1 inner product, unit diffusion and unit weight."""
    ones = np.ones(mesh.n_elems)
    k_diag, k_off = _stiffness_bands(mesh, ones)
    m_diag, m_off = _mass_bands(mesh, ones)
    return _tridiagonal(k_diag + m_diag, k_off + m_off)

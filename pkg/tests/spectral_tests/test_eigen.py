"""Test the generalized eigensolve and the eigenvalue quantities."""

import numpy as np
import pytest

from src.discretization import CoefficientField, IntervalMesh, assemble
from src.harness import FAMILIES
from src.spectral import (
    eigen_projector,
    eigensolve,
    eigenvalue_gap,
    full_decomposition,
    spectrum_separation,
)
from src.utils.errors import DomainError


def _constant(n: int = 32, p: float = 100.0):
    mesh = IntervalMesh.uniform(n)
    return assemble(mesh, CoefficientField.constant(mesh, p, 0.0, 0.5, floor=0.2))


def test_constant_slow_mode():
    """Test lambda_1 = lambda + V0 with phi_1 = 1 on the unit interval."""
    dec = eigensolve(_constant(), 3)
    assert dec.eigenvalues[0] == pytest.approx(0.5, rel=1e-9)
    np.testing.assert_allclose(dec.slow_mode, 1.0, rtol=1e-8)
    assert np.all(np.diff(dec.eigenvalues) > 0)


def test_neumann_gap():
    """Test lambda_2 / p -> pi^2 for large p and a fine mesh."""
    dec = eigensolve(_constant(n=256, p=1e4), 2)
    assert dec.eigenvalues[1] / 1e4 == pytest.approx(np.pi**2, rel=1e-3)


def test_mode_count_checked():
    """Test that k outside [1, n] is rejected."""
    op = _constant(n=4)
    with pytest.raises(DomainError):
        eigensolve(op, 0)
    with pytest.raises(DomainError):
        eigensolve(op, op.n + 1)


def test_full_decomposition_is_m_orthonormal():
    """Test Phi^T M Phi = I and Phi^T G Phi = diag(lambda)."""
    op = _constant(n=16)
    dec = full_decomposition(op)
    phi = dec.eigenvectors
    np.testing.assert_allclose(phi.T @ op.M @ phi, np.eye(op.n), atol=1e-10)
    np.testing.assert_allclose(
        phi.T @ op.G @ phi, np.diag(dec.eigenvalues), atol=1e-8 * dec.eigenvalues[-1]
    )


def test_eigenvalue_gap_shrinks_with_eps():
    """Test |lambda_1 - lambda_bar| decreasing along the sine family."""
    family = FAMILIES["f1"]
    mesh = IntervalMesh.uniform(64)
    gaps = []
    for eps in (2.0**-2, 2.0**-4, 2.0**-6):
        op = assemble(mesh, family.coefficients(mesh, eps, 0.2))
        dec = eigensolve(op, 2)
        gaps.append(eigenvalue_gap(dec, family.center))
        assert spectrum_separation(dec, family.center)

    assert gaps[0] > gaps[1] > gaps[2]


def test_eigen_projector_rank_one():
    """Test that the circle around lambda_bar encloses exactly lambda_1."""
    op = _constant()
    matrix, enclosed = eigen_projector(op, 0.5, 0.65)
    assert enclosed.size == 1
    np.testing.assert_allclose(matrix @ matrix, matrix, atol=1e-10)

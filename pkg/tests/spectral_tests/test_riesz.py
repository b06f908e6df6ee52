"""Test the contour-quadrature spectral projection."""

import numpy as np
import pytest

from src.discretization import (
    AveragingProjection,
    CoefficientField,
    IntervalMesh,
    assemble,
)
from src.spectral import (
    contour_points,
    eigensolve,
    projection_gap,
    riesz_projection,
)
from src.utils.errors import ContourCollisionError, DomainError


@pytest.fixture()
def op():
    """Constant coefficients p = 100, lambda + V0 = 1/2 on 32 elements."""
    mesh = IntervalMesh.uniform(32)
    return assemble(mesh, CoefficientField.constant(mesh, 100.0, 0.0, 0.5, floor=0.2))


def test_contour_points():
    """Test that no node is real and the weights sum to zero."""
    nodes, weights = contour_points(0.5, 0.25, 16)
    assert np.all(np.abs(nodes.imag) > 0)
    np.testing.assert_allclose(np.abs(nodes - 0.5), 0.25)
    assert abs(weights.sum()) < 1e-15


def test_constant_case_projection_is_average(op):
    """Test Q = P when the slow eigenvector is constant."""
    q = riesz_projection(op, 0.5)
    assert q.rank == 1
    assert projection_gap(q, AveragingProjection.on(op.mesh), op) < 1e-8

    values = q.singular_values(op)
    assert values[0] == pytest.approx(1.0, rel=1e-8)
    assert values[1] < 1e-6


def test_odd_quadrature_rejected(op):
    """Test that an odd node count is rejected."""
    with pytest.raises(DomainError):
        riesz_projection(op, 0.5, n_quad=31)


def test_contour_collision(op):
    """Test an eigenvalue lying on the circle."""
    lam1 = float(eigensolve(op, 1).eigenvalues[0])
    with pytest.raises(ContourCollisionError):
        riesz_projection(op, lam1 + 1.0, radius=1.0)


def test_contour_through_second_eigenvalue(op):
    """Test a circle around lambda_1 whose radius hits lambda_2 exactly."""
    values = eigensolve(op, 3).eigenvalues
    with pytest.raises(ContourCollisionError):
        riesz_projection(op, float(values[0]), radius=float(values[1] - values[0]))

"""Test the Neumann elliptic solve and the norms."""

import numpy as np
import pytest

from src.discretization import (
    CoefficientField,
    IntervalMesh,
    assemble,
    norm,
    solve_elliptic,
)


def _operator(n: int, p: float = 1.0, v0: float = 0.0, shift: float = 1.0):
    mesh = IntervalMesh.uniform(n)
    return assemble(mesh, CoefficientField.constant(mesh, p, v0, shift, floor=0.2))


def test_constant_data_gives_constant_solution():
    """Test that u = g / (lambda + V0) for constant g."""
    op = _operator(16, p=1e3, v0=0.0, shift=0.5)
    u = solve_elliptic(op, op.mesh.interpolate(lambda x: 2.0))
    np.testing.assert_allclose(u, 4.0, rtol=1e-9)


def test_second_order_convergence():
    """Test O(h^2) L^2 convergence on -u'' + u = (pi^2 + 1) cos(pi x)."""
    errors = []
    for n in (32, 64):
        op = _operator(n)
        exact = op.mesh.interpolate(lambda x: np.cos(np.pi * x))
        u = solve_elliptic(op, (np.pi**2 + 1.0) * exact)
        errors.append(norm(u - exact, op, "l2"))

    assert 3.5 <= errors[0] / errors[1] <= 4.5


def test_norms_of_constants():
    """Test ||1||_energy = sqrt(lambda + V0), ||1||_{H^1} = ||1||_{L^2} = 1."""
    op = _operator(8, p=50.0, v0=0.0, shift=0.5)
    ones = np.ones(op.n)
    assert norm(ones, op) == pytest.approx(np.sqrt(0.5), rel=1e-14)
    assert norm(ones, op, "h1") == pytest.approx(1.0, rel=1e-14)
    assert norm(ones, op, "l2") == pytest.approx(1.0, rel=1e-14)

    with pytest.raises(ValueError):
        norm(ones, op, "max")  # type: ignore[arg-type]

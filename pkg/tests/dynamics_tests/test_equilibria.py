"""Test limit roots, Newton and the perturbed equilibria."""

import importlib

import numpy as np
import pytest

from src.discretization import CoefficientField, IntervalMesh, assemble, norm
from src.dynamics import (
    Equilibrium,
    cubic,
    limit_equilibria,
    linear,
    linearization_margin,
    newton,
    perturbed_equilibria,
)
from src.harness import FAMILIES
from src.utils.errors import DomainError, HyperbolicityError, NonConvergenceError


@pytest.fixture()
def op():
    """Constant coefficients with lambda + V0 = 1/2."""
    mesh = IntervalMesh.uniform(32)
    return assemble(mesh, CoefficientField.constant(mesh, 100.0, 0.0, 0.5, floor=0.2))


def test_limit_roots_of_cubic():
    """Test 0.5 u = u - u^3 giving 0 and +-sqrt(1/2) with their stability."""
    roots = limit_equilibria(cubic(1.0), 0.5)
    values = [float(root.value) for root in roots]
    np.testing.assert_allclose(values, [-np.sqrt(0.5), 0.0, np.sqrt(0.5)], atol=1e-13)
    assert [root.stable for root in roots] == [True, False, True]
    assert roots[0].margin == pytest.approx(1.0)
    assert roots[1].margin == pytest.approx(0.5)
    assert max(root.residual for root in roots) < 1e-14


def test_linear_reaction_has_single_stable_root():
    """Test u = -u at center 1 leaving only u = 0, stable."""
    roots = limit_equilibria(linear(-1.0), 1.0)
    assert len(roots) == 1
    assert abs(roots[0].value) < 1e-12
    assert roots[0].stable
    assert roots[0].margin == pytest.approx(2.0)


def test_roots_do_not_depend_on_scan_resolution():
    """Test that a coarse scan finds the same polished roots as a fine one."""
    fine = limit_equilibria(cubic(1.0), 0.5, n_scan=1000)
    coarse = limit_equilibria(cubic(1.0), 0.5, n_scan=100)
    np.testing.assert_allclose(
        [root.value for root in coarse], [root.value for root in fine], atol=1e-12
    )


def test_bracket_must_cover_radius():
    """Test that a scan interval inside the dissipative radius is rejected."""
    with pytest.raises(DomainError):
        limit_equilibria(cubic(1.0), 0.5, bracket=(-1.0, 1.0))


def test_degenerate_root():
    """Test the triple root of u^3 = 0 failing the hyperbolicity check."""
    with pytest.raises(HyperbolicityError):
        limit_equilibria(cubic(1.0), 1.0)


def test_nodal_embedding():
    """Test scalar equilibria embedding as constant vectors."""
    np.testing.assert_array_equal(Equilibrium(2.0, 1.0, True).nodal(3), [2.0] * 3)


def test_constant_case_keeps_limit_roots(op):
    """Test that constant roots already solve the discrete problem."""
    found = perturbed_equilibria(op, cubic(1.0), limit_equilibria(cubic(1.0), 0.5))
    assert len(found) == 3
    for item in found:
        assert item.distance < 1e-10
        assert item.unique
        assert not item.collided

    assert [item.equilibrium.stable for item in found] == [True, False, True]
    assert found[0].equilibrium.margin == pytest.approx(1.0, rel=1e-8)


def test_linearization_margin_at_zero(op):
    """Test the unstable margin lambda_1 - f'(0) = -1/2 at u = 0."""
    margin, stable = linearization_margin(op, cubic(1.0), np.zeros(op.n))
    assert margin == pytest.approx(0.5, rel=1e-8)
    assert not stable


def test_newton_gives_up(op):
    """Test that a single step from far away does not converge."""
    with pytest.raises(NonConvergenceError):
        newton(op, cubic(1.0), 2.0 * np.ones(op.n), tol=1e-14, max_iter=1)


def test_newton_rejects_stalled_line_search(op, monkeypatch):
    """Test that exhausting the step halvings raises instead of accepting."""
    module = importlib.import_module("src.dynamics.equilibria")
    monkeypatch.setattr(module, "_dual_norm", lambda op, r: 1.0)
    with pytest.raises(NonConvergenceError, match="reduced the residual"):
        newton(op, cubic(1.0), 0.3 * np.ones(op.n))


def test_distances_shrink_with_eps():
    """Test equilibria of the sine family approaching the constant roots."""
    family = FAMILIES["f1"]
    mesh = IntervalMesh.uniform(64)
    reaction = cubic(family.default_gain)
    seeds = limit_equilibria(reaction, family.center)

    worst = []
    for eps in (2.0**-3, 2.0**-6):
        op = assemble(mesh, family.coefficients(mesh, eps, 0.2))
        found = perturbed_equilibria(op, reaction, seeds)
        assert all(item.equilibrium.residual <= 1e-10 for item in found)
        u = found[-1].equilibrium.value
        assert norm(u - seeds[-1].nodal(op.n), op) == pytest.approx(found[-1].distance)
        worst.append(max(item.distance for item in found))

    assert worst[1] < worst[0]

"""Test the fast and slow semigroup estimates."""

import numpy as np
import pytest

from src.discretization import (
    AveragingProjection,
    CoefficientField,
    IntervalMesh,
    assemble,
)
from src.harness import FAMILIES
from src.spectral import (
    eigensolve,
    semigroup_decay_check,
    slow_semigroup_check,
    slow_semigroup_gap,
)
from src.utils.errors import DomainError, ProjectionError


@pytest.fixture()
def dec():
    """Twelve modes of the sine family at eps = 2^-4."""
    mesh = IntervalMesh.uniform(64)
    op = assemble(mesh, FAMILIES["f1"].coefficients(mesh, 2.0**-4, 0.2))
    return eigensolve(op, 12)


def test_fast_decay_bound(dec):
    """Test ||e^{-At} z|| e^{lambda_2 t} <= ||z|| for random fast data."""
    rng = np.random.default_rng(0)
    times = np.geomspace(1e-4, 1.0, 20)
    for _ in range(5):
        z = dec.eigenvectors[:, 1:] @ rng.standard_normal(dec.k - 1)
        report = semigroup_decay_check(dec, times, z)
        assert report.passed
        assert report.max_ratio <= 1.0 + 1e-6


def test_pure_second_mode_is_sharp(dec):
    """Test that z = phi_2 attains ratio one."""
    report = semigroup_decay_check(dec, np.array([0.1, 1.0]), dec.eigenvectors[:, 1])
    np.testing.assert_allclose(report.ratios, 1.0, rtol=1e-8)


def test_slow_component_rejected(dec):
    """Test that data with a slow component is refused."""
    with pytest.raises(ProjectionError):
        semigroup_decay_check(dec, np.array([1.0]), dec.slow_mode)
    with pytest.raises(DomainError):
        semigroup_decay_check(dec, np.array([0.0]), dec.eigenvectors[:, 1])


def test_slow_growth_bound(dec):
    """Test e^{(gamma - lambda_1) t} <= 1 for t <= 0 and a small backward gap."""
    report = slow_semigroup_check(dec, 0.5)
    assert report.passed
    assert report.backward_gap < 0.1

    with pytest.raises(DomainError):
        slow_semigroup_check(dec, 0.5, np.array([0.5]))


def test_default_decay_times(dec):
    """Test twenty default samples spread over (0, 2]."""
    z = dec.eigenvectors[:, 1] + dec.eigenvectors[:, 2]
    report = semigroup_decay_check(dec, None, z)
    assert report.times.size == 20
    assert report.times.min() > 0.0
    assert report.times.max() == pytest.approx(2.0)
    assert report.passed


def test_slow_semigroup_gap_vanishes_for_constants():
    """Test the backward slow flows coinciding when phi_1 is constant."""
    mesh = IntervalMesh.uniform(32)
    op = assemble(mesh, CoefficientField.constant(mesh, 100.0, 0.0, 0.5, floor=0.2))
    gap = slow_semigroup_gap(eigensolve(op, 2), AveragingProjection.on(mesh), 0.5)
    assert gap < 1e-6


def test_slow_semigroup_gap_shrinks_with_eps():
    """Test the operator-norm backward gap decreasing along the sine family."""
    mesh = IntervalMesh.uniform(64)
    proj = AveragingProjection.on(mesh)
    gaps = []
    for eps in (2.0**-3, 2.0**-6):
        op = assemble(mesh, FAMILIES["f1"].coefficients(mesh, eps, 0.2))
        gaps.append(slow_semigroup_gap(eigensolve(op, 2), proj, 0.5))

    assert 0.0 < gaps[1] < gaps[0]
    with pytest.raises(DomainError):
        slow_semigroup_gap(eigensolve(op, 2), proj, 0.5, np.array([0.1]))

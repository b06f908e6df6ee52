"""Test the scale families and the dyadic epsilon grid."""

import numpy as np
import pytest

from src.discretization import IntervalMesh
from src.harness import FAMILIES, dyadic_grid, get_family
from src.utils.errors import ConfigError


def test_sine_family_rate():
    """Test tau = eps * 2 / pi and delta = tau + eps^(1/2) for the sine family."""
    family = FAMILIES["f1"]
    assert family.w_norm == pytest.approx(2.0 / np.pi, rel=1e-10)
    assert family.p(2.0**-4) == pytest.approx(16.0)
    assert family.delta(2.0**-4) == pytest.approx(2.0**-4 * 2.0 / np.pi + 0.25)


def test_slow_potential_family():
    """Test the quarter-power potential decay and the larger default gain."""
    family = get_family("f2")
    assert family.tau(2.0**-8) == pytest.approx(0.25 * 2.0 / np.pi, rel=1e-10)
    assert family.center == 1.5
    assert family.default_gain == 2.0


def test_constant_family_has_no_potential():
    """Test w = 0 leaving only the diffusion part of the rate."""
    family = FAMILIES["const"]
    assert family.tau(0.5) == 0.0
    assert family.delta(2.0**-6) == pytest.approx(0.125)

    mesh = IntervalMesh.uniform(4)
    coeff = family.coefficients(mesh, 2.0**-3, 0.2)
    np.testing.assert_allclose(coeff.diffusion, 8.0)
    np.testing.assert_allclose(coeff.reaction_weight, 0.5)


def test_unknown_family():
    """Test that an unknown name is a configuration error."""
    with pytest.raises(ConfigError):
        get_family("f3")


def test_dyadic_grid():
    """Test the default grid 2^-2 ... 2^-10 and non-dyadic end points."""
    grid = dyadic_grid(2.0**-2, 2.0**-10)
    assert grid.size == 9
    assert grid[-1] == 2.0**-10
    assert np.all(np.diff(grid) < 0.0)
    assert dyadic_grid(0.25, 0.05).tolist() == [0.25, 0.125, 0.0625]

"""Test the rate-check command line."""

from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from src.harness.cli import rates


COARSE = ["--family", "const", "--n", "16", "--eps-lo", "0.015625", "--no-progress"]


@pytest.fixture()
def runner():
    """Click runner."""
    return CliRunner()


def test_resolvent_rate_passes(runner, tmp_path: Path):
    """Test exit code 0, the CSV and the summary of a passing sweep."""
    result = runner.invoke(rates, ["resolvent-rate", *COARSE, "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    summary = (tmp_path / "summary.txt").read_text()
    assert summary.startswith("resolvent ")
    assert "sector " in summary
    assert (tmp_path / "resolvent.csv").read_text().startswith("eps,delta,error,flag")


def test_config_file(runner, tmp_path: Path):
    """Test settings read from --config with flags taking precedence."""
    config = tmp_path / "run.cfg"
    config.write_text("family = const\nn = 16\neps_lo = 0.015625\nn_quad = 16\n")
    out = tmp_path / "out"
    result = runner.invoke(
        rates,
        ["norm-ratio", "--config", str(config), "--out", str(out), "--no-progress"],
    )
    assert result.exit_code == 0, result.output
    assert "norm_ratio" in (out / "summary.txt").read_text()


def test_usage_errors(runner, tmp_path: Path):
    """Test exit code 2 for bad settings and a sweep without quantities."""
    bad_grid = ["--eps-hi", "0.01", "--eps-lo", "0.1", "--out", str(tmp_path)]
    result = runner.invoke(rates, ["spectrum", *bad_grid])
    assert result.exit_code == 2

    result = runner.invoke(rates, ["sweep", "--no-progress", "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_dump_operator(runner, tmp_path: Path):
    """Test the dense S, W, M, G files at one epsilon."""
    result = runner.invoke(
        rates, ["dump-operator", "--eps", "0.25", "--n", "4", "--out", str(tmp_path)]
    )
    assert result.exit_code == 0, result.output

    s, w, g = (np.loadtxt(tmp_path / f"{name}.txt") for name in ("S", "W", "G"))
    assert g.shape == (5, 5)
    np.testing.assert_allclose(g, s + w, rtol=1e-15)
    np.testing.assert_allclose(s @ np.ones(5), 0.0, atol=1e-12)


def test_failed_criterion_exits_one(runner, tmp_path: Path):
    """Test exit code 1 and a FAIL line when a slope misses the floor."""
    config = tmp_path / "strict.cfg"
    config.write_text("slope_floor = 5.0\n")
    out = tmp_path / "out"
    result = runner.invoke(
        rates,
        ["resolvent-rate", *COARSE, "--config", str(config), "--out", str(out)],
    )
    assert result.exit_code == 1, result.output
    summary = (out / "summary.txt").read_text().splitlines()
    assert summary[0].startswith("resolvent ")
    assert " FAIL # " in summary[0]

"""Test pass criteria, CSV output and the summary file."""

from pathlib import Path

import numpy as np
import pytest

from src.harness import (
    QUANTITIES,
    RateSeries,
    Row,
    RunConfig,
    evaluate,
    report,
    write_csv,
)
from src.harness.report import DESCRIPTIONS, EXIT_FAILED, EXIT_PASS, summary_line
from src.utils.errors import ConfigError


EPS = 2.0 ** -np.arange(2, 7)


def _series(quantity: str, errors) -> RateSeries:
    rows = [Row(eps=e, delta=e, error=err) for e, err in zip(EPS, errors)]
    return RateSeries(quantity=quantity, rows=rows)


def test_rate_quantity():
    """Test a linear rate passing and a stalled one failing."""
    assert evaluate(_series("resolvent", 2.0 * EPS), 0.9).passed
    assert not evaluate(_series("projection", np.full(EPS.size, 0.3)), 0.9).passed


def test_noise_floor_passes():
    """Test that errors below the noise floor everywhere count as converged."""
    result = evaluate(_series("equilibria", np.full(EPS.size, 1e-15)), 0.9)
    assert result.passed
    assert result.fit is None
    assert "noise floor" in result.note


def test_spectrum_gap_criterion():
    """Test lambda_2 / p approaching pi^2 within two percent."""
    close = np.pi**2 * (1.0 + 0.1 * EPS)
    assert evaluate(_series("spectrum_gap", close), 0.9).passed
    assert not evaluate(_series("spectrum_gap", 1.1 * close), 0.9).passed


def test_norm_ratio_criterion():
    """Test growth of the energy/H1 ratio by at least 1.5 per halving."""
    assert evaluate(_series("norm_ratio", 1.0 / EPS), 0.9).passed
    assert not evaluate(_series("norm_ratio", np.full(EPS.size, 5.0)), 0.9).passed


def test_semigroup_criterion():
    """Test the decay ratio bound of one."""
    assert evaluate(_series("semigroup", np.full(EPS.size, 1.0)), 0.9).passed
    assert not evaluate(_series("semigroup", np.full(EPS.size, 1.01)), 0.9).passed


def test_separation_criterion():
    """Test separation required from a threshold down to the finest epsilon."""
    late = evaluate(_series("separation", [3.0, 1.5, 0.8, 0.4, 0.2]), 0.9)
    assert late.passed
    assert "eps <= 0.0625" in late.note

    assert not evaluate(_series("separation", [0.5, 0.4, 0.3, 0.2, 1.2]), 0.9).passed
    assert not evaluate(_series("separation", [0.5, 0.4, 0.3, 0.2, np.nan]), 0.9).passed

    rows = [Row(eps=e, delta=e, error=0.5) for e in EPS[:-1]]
    rows.append(Row(eps=EPS[-1], delta=EPS[-1], error=0.5, flag="unseparated"))
    assert not evaluate(RateSeries(quantity="separation", rows=rows), 0.9).passed


def test_every_quantity_names_its_estimate():
    """Test that each summary line names the result it verifies."""
    for quantity in QUANTITIES:
        result = evaluate(_series(quantity, 2.0 * EPS), 0.9)
        assert result.description == DESCRIPTIONS[quantity]
        assert ": " in result.description
        assert summary_line(result).split(" # ", 1)[1].startswith(result.description)


def test_unknown_quantity():
    """Test that a quantity without a criterion is refused."""
    with pytest.raises(ValueError, match="no criterion"):
        evaluate(_series("bogus", EPS), 0.9)


def test_write_csv(tmp_path: Path):
    """Test the header, full precision and flags without commas."""
    rows = [Row(0.5, 0.5, 1.0 / 3.0, "clamped,lipschitz"), Row(0.25, 0.25, 0.1)]
    series = RateSeries("manifold", rows)
    path = tmp_path / "manifold.csv"
    write_csv(series, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "eps,delta,error,flag"
    assert lines[1] == "0.5,0.5,0.33333333333333331,clamped;lipschitz"
    assert lines[2].endswith(",")


def test_report_files_and_exit_code(tmp_path: Path):
    """Test summary.txt, one CSV per quantity and the combined exit code."""
    config = RunConfig(out=tmp_path)
    good = _series("resolvent", 2.0 * EPS)
    code, results = report([good], config)
    assert code == EXIT_PASS
    assert (tmp_path / "resolvent.csv").exists()

    bad = _series("attractor", np.full(EPS.size, 0.3))
    code, results = report([good, bad], config)
    assert code == EXIT_FAILED
    summary = (tmp_path / "summary.txt").read_text().splitlines()
    assert summary[0].startswith("resolvent slope=1 C=2 R2=1 PASS")
    assert summary[1] == summary_line(results[1])
    assert " FAIL " in summary[1]

    with pytest.raises(ConfigError):
        report([], config)

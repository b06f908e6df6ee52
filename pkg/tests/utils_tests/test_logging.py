"""Test the logging filter and pretty printing."""

import logging

import numpy as np

from src.utils import pretty_print, set_up_logging
from src.utils.logging import RepeatedFlagFilter


def _record(msg: str, name: str = "src.dynamics.manifold") -> logging.LogRecord:
    return logging.LogRecord(name, logging.WARNING, __file__, 1, msg, None, None)


def test_repeated_flags_pass_once():
    """Test that identical clamp messages are dropped after the first."""
    filter_ = RepeatedFlagFilter()
    message = "clamped 3 of 129 backward trajectories at the grid edge"
    assert filter_.filter(_record(message))
    assert not filter_.filter(_record(message))
    assert filter_.filter(_record("clamped 4 of 129 backward trajectories"))
    assert filter_.filter(_record(message, name="other"))


def test_other_messages_always_pass():
    """Test that unrelated warnings are never filtered."""
    filter_ = RepeatedFlagFilter()
    for _ in range(3):
        assert filter_.filter(_record("Newton did not converge"))


def test_pretty_print_arrays(capsys):
    """Test JSON output of numpy values."""
    output = pretty_print({"rates": np.array([1.5, 2.0]), "lam2": np.float64(3.0)})
    assert '"lam2": 3.0' in output
    assert output in capsys.readouterr().out


def test_set_up_logging_installs_one_filter():
    """Test that repeated setup keeps a single flag filter per handler."""
    root = logging.getLogger()
    handler = logging.NullHandler()
    root.addHandler(handler)
    try:
        set_up_logging()
        set_up_logging(logging.DEBUG)
        filters = [f for f in handler.filters if isinstance(f, RepeatedFlagFilter)]
        assert len(filters) == 1
        assert root.level == logging.DEBUG
    finally:
        root.removeHandler(handler)
        root.setLevel(logging.WARNING)

"""Command-line entry point: ``python -m src.harness <command> [options]``."""

import logging
import sys
from functools import wraps
from pathlib import Path

import click
import numpy as np

from ..discretization import IntervalMesh, assemble
from ..utils import RateCheckError, pretty_print, set_up_logging
from ..utils.errors import ConfigError
from .config import RunConfig
from .report import EXIT_FAILED, EXIT_USAGE, report
from .sweep import QUANTITIES, manifold_diagnostics, sweep_all


logger = logging.getLogger(__name__)

CONFIG_FLAGS = ("out", "eps_hi", "eps_lo", "n", "family", "seed")

COMMAND_QUANTITIES = {
    "resolvent-rate": ("resolvent", "sector"),
    "spectrum": (
        "spectrum_gap",
        "separation",
        "eigenvalue",
        "projection",
        "eigenspace",
        "semigroup",
        "slow_semigroup",
    ),
    "equilibria": ("equilibria",),
    "manifold": ("manifold",),
    "attractor-rate": ("attractor",),
    "norm-ratio": ("norm_ratio",),
    "report-all": QUANTITIES,
}


def _load_config(config_path: str | None, **flags) -> RunConfig:
    base = RunConfig.from_file(config_path) if config_path else RunConfig()
    return base.with_overrides(**flags)


def common_options(fn):
    """Options shared by every sweeping command."""

    @click.option("--config", "config_path", type=click.Path(), default=None)
    @click.option("--out", type=click.Path(file_okay=False), default=None)
    @click.option("--eps-hi", type=float, default=None)
    @click.option("--eps-lo", type=float, default=None)
    @click.option("--n", type=int, default=None, help="Number of mesh elements.")
    @click.option("--family", type=click.Choice(["f1", "f2", "const"]), default=None)
    @click.option("--seed", type=int, default=None)
    @click.option("--verbose", is_flag=True, help="Log at DEBUG level.")
    @click.option("--progress/--no-progress", default=True)
    @wraps(fn)
    def wrapper(config_path, verbose, progress, **kwargs):
        set_up_logging(logging.DEBUG if verbose else logging.INFO)
        flags = {key: kwargs.pop(key) for key in CONFIG_FLAGS}
        try:
            config = _load_config(config_path, **flags)
        except ConfigError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_USAGE)
        return fn(config, progress, **kwargs)

    return wrapper


def _run(config: RunConfig, quantities: tuple[str, ...], progress: bool) -> int:
    """Sweep, report and print the summary; returns the exit code."""
    try:
        series = sweep_all(config, quantities, show_progress=progress)
        code, results = report(series, config)
    except ConfigError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_USAGE
    except OSError as e:
        click.echo(f"error: cannot write results: {e}", err=True)
        return EXIT_USAGE
    except RateCheckError as e:
        logger.error("%s", e)
        return EXIT_FAILED

    pretty_print(results)
    return code


@click.group()
def rates() -> None:
    """Convergence-rate checks for large-diffusion reaction-diffusion problems."""


def _register(name: str, quantities: tuple[str, ...], help_text: str) -> None:
    @rates.command(name=name, help=help_text)
    @common_options
    def _command(config: RunConfig, progress: bool) -> None:
        sys.exit(_run(config, quantities, progress))


for _name, _quantities in COMMAND_QUANTITIES.items():
    _register(_name, _quantities, f"Sweep {', '.join(_quantities)}.")


@rates.command(name="sweep")
@click.option(
    "--quantity", "-q", "quantities", multiple=True, type=click.Choice(QUANTITIES)
)
@common_options
def sweep_command(
    config: RunConfig, progress: bool, quantities: tuple[str, ...]
) -> None:
    """Sweep an explicit list of quantities."""
    if not quantities:
        click.echo(click.get_current_context().get_usage(), err=True)
        click.echo("error: give at least one --quantity", err=True)
        sys.exit(EXIT_USAGE)
    sys.exit(_run(config, tuple(quantities), progress))


@rates.command(name="diagnose-manifold")
@click.option("--eps", type=float, required=True)
@common_options
def diagnose_manifold(config: RunConfig, progress: bool, eps: float) -> None:
    """Attraction rates and invariance residual of the manifold at one epsilon."""
    del progress
    try:
        diagnostics = manifold_diagnostics(config, eps)
    except RateCheckError as e:
        logger.error("%s", e)
        sys.exit(EXIT_FAILED)
    pretty_print(diagnostics)
    sys.exit(0 if diagnostics.attraction_passed else EXIT_FAILED)


@rates.command(name="dump-operator")
@click.option("--eps", type=float, required=True)
@common_options
def dump_operator(config: RunConfig, progress: bool, eps: float) -> None:
    """Write S, W, M and G at one epsilon as dense text, 17 significant digits."""
    del progress
    mesh = IntervalMesh.uniform(config.n)
    try:
        op = assemble(mesh, config.scale_family.coefficients(mesh, eps, config.m0))
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        for name in ("S", "W", "M", "G"):
            np.savetxt(out / f"{name}.txt", getattr(op, name), fmt="%.17g")
    except OSError as e:
        click.echo(f"error: cannot write operator: {e}", err=True)
        sys.exit(EXIT_USAGE)
    except RateCheckError as e:
        logger.error("%s", e)
        sys.exit(EXIT_FAILED)
    click.echo(f"wrote S, W, M, G ({op.n} x {op.n}) to {out}")

"""Pass criteria, CSV output and the run summary."""

import logging
from pathlib import Path

import numpy as np
import pydantic

from ..utils.errors import ConfigError, InsufficientDataError
from .config import RunConfig
from .fit import NOISE_FLOOR, FitResult, RateSeries, fit_rate


logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

CSV_HEADER = "eps,delta,error,flag"

DESCRIPTIONS = {
    "resolvent": "resolvent convergence: ||A_eps^-1 - A_0^-1 P|| (L2 -> energy)",
    "projection": "spectral projection convergence: ||Q_eps - P||",
    "eigenspace": "eigenspace convergence: d_H of span(phi_1) and constants",
    "eigenvalue": "eigenvalue convergence: |lambda_1 - (lambda + V0)|",
    "equilibria": "equilibrium convergence: max energy distance to limit roots",
    "manifold": "invariant manifold convergence: sup norm of the section",
    "attractor": "attractor continuity: d_H of perturbed and limit attractors",
    "norm_ratio": "no uniform norm equivalence: sup energy / H1 ratio grows like p",
    "spectrum_gap": "spectral gap: lambda_2 / p against pi^2",
    "separation": "spectrum separation: R / lambda_2 with R = 2 + lambda + V0",
    "sector": "sectorial resolvent convergence: max gap over the sector arc",
    "semigroup": "fast semigroup decay: max of e^{lambda_2 t} ||e^{-A t} z|| / ||z||",
    "slow_semigroup": (
        "slow semigroup convergence: ||e^{-A_eps t} Q_eps - e^{-A_0 t} P||, t <= 0"
    ),
}

RATE_QUANTITIES = frozenset(
    {
        "resolvent",
        "projection",
        "eigenspace",
        "eigenvalue",
        "equilibria",
        "manifold",
        "attractor",
        "sector",
        "slow_semigroup",
    }
)

SPECTRUM_TOL = 0.02
NORM_GROWTH = 1.5
NORM_GROWTH_FROM = 2.0**-4
SEMIGROUP_LIMIT = 1.0 + 1e-6


class QuantityResult(pydantic.BaseModel):
    """Fit and verdict for one swept quantity."""

    name: str
    description: str
    fit: FitResult | None
    passed: bool
    note: str = ""
    flags: list[str] = []


def _criterion(series: RateSeries) -> tuple[bool, str]:
    """Verdict of the non-rate quantities."""
    eps, error = series.eps, series.error
    if series.quantity == "spectrum_gap":
        target = np.pi**2
        floor_ok = bool(np.all(error >= 0.5 * target))
        last_ok = bool(abs(error[-1] - target) <= SPECTRUM_TOL * target)
        return floor_ok and last_ok, f"last lambda_2/p = {error[-1]:.6g}"

    if series.quantity == "norm_ratio":
        tail = error[eps <= NORM_GROWTH_FROM * (1.0 + 1e-12)]
        growth = tail[1:] / tail[:-1]
        ok = bool(growth.size > 0 and np.all(growth >= NORM_GROWTH))
        worst = float(growth.min()) if growth.size else float("nan")
        return ok, f"min growth {worst:.4g}"

    if series.quantity == "separation":
        separated = np.isfinite(error) & (error < 1.0)
        # Rows from the threshold down to the finest epsilon must all separate.
        start = len(separated)
        while start > 0 and separated[start - 1]:
            start -= 1
        ok = start < len(separated) and not any(
            "unseparated" in row.flag for row in series.rows[start:]
        )
        threshold = float(eps[start]) if ok else float("nan")
        return bool(ok), f"separated for eps <= {threshold:.6g}"

    if series.quantity == "semigroup":
        worst = float(np.max(error))
        return bool(worst <= SEMIGROUP_LIMIT), f"max ratio {worst:.12g}"

    raise ValueError(f"no criterion for {series.quantity!r}")


def evaluate(series: RateSeries, slope_floor: float) -> QuantityResult:
    """Fit the series and apply the quantity's pass criterion."""
    note = ""
    try:
        fit: FitResult | None = fit_rate(series, slope_floor)
    except InsufficientDataError as e:
        fit = None
        note = str(e)

    if series.quantity in RATE_QUANTITIES:
        finite = series.error[np.isfinite(series.error)]
        if fit is not None:
            passed = fit.passed
        elif finite.size == len(series.rows) and np.all(finite <= NOISE_FLOOR):
            passed, note = True, "all errors below the noise floor"
        else:
            passed = False
    else:
        passed, note = _criterion(series)

    return QuantityResult(
        name=series.quantity,
        description=DESCRIPTIONS.get(series.quantity, ""),
        fit=fit,
        passed=passed,
        note=note,
        flags=series.flags,
    )


def _format(value: float) -> str:
    return f"{value:.17g}"


def write_csv(series: RateSeries, path: Path) -> None:
    """Write ``eps,delta,error,flag`` rows with 17 significant digits."""
    lines = [CSV_HEADER]
    for row in series.rows:
        flag = row.flag.replace(",", ";")
        lines.append(
            ",".join([_format(row.eps), _format(row.delta), _format(row.error), flag])
        )
    path.write_text("\n".join(lines) + "\n")


def summary_line(result: QuantityResult) -> str:
    """name, slope, C, R^2, pass and the estimate being checked."""
    if result.fit is None:
        numbers = "slope=nan C=nan R2=nan"
    else:
        numbers = (
            f"slope={result.fit.slope:.6g} C={result.fit.constant:.6g}"
            f" R2={result.fit.r_squared:.6g}"
        )
    verdict = "PASS" if result.passed else "FAIL"
    line = f"{result.name} {numbers} {verdict} # {result.description}"
    if result.note:
        line += f" ({result.note})"
    return line


def report(
    series_list: list[RateSeries], config: RunConfig
) -> tuple[int, list[QuantityResult]]:
    """Write ``<quantity>.csv`` files and ``summary.txt`` into ``config.out``.

    Returns
    -------
    tuple[int, list[QuantityResult]]
        Exit code (0 all pass, 1 some criterion failed) and the per-quantity
        results. ``OSError`` from the file system propagates.
    """
    if not series_list:
        raise ConfigError("no quantity was swept")

    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    results = []
    for series in series_list:
        write_csv(series, out / f"{series.quantity}.csv")
        result = evaluate(series, config.slope_floor)
        if not result.passed:
            logger.warning("%s failed: %s", result.name, summary_line(result))
        results.append(result)

    (out / "summary.txt").write_text(
        "\n".join(summary_line(result) for result in results) + "\n"
    )
    code = EXIT_PASS if all(result.passed for result in results) else EXIT_FAILED
    return code, results

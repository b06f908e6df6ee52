"""Scale families, sweeps, rate fits, reports and the command line."""

from .config import RunConfig
from .families import FAMILIES, ScaleFamily, dyadic_grid, get_family
from .fit import FitResult, RateSeries, Row, fit_rate
from .report import QuantityResult, evaluate, report, summary_line, write_csv
from .sweep import (
    QUANTITIES,
    EpsilonCase,
    ManifoldDiagnostics,
    manifold_diagnostics,
    measure_row,
    off_equilibrium_start,
    sweep,
    sweep_all,
)

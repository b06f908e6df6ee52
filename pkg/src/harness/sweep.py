"""Per-epsilon measurement of every rate-checked quantity, run as a sweep."""

import asyncio
import logging
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import pydantic

from ..discretization import (
    AveragingProjection,
    DiscreteOperator,
    IntervalMesh,
    assemble,
)
from ..dynamics import (
    Equilibrium,
    GraphSection,
    ModalBasis,
    PerturbedEquilibrium,
    Reaction,
    attractor_gap,
    exponential_attraction_check,
    limit_equilibria,
    manifold_consistency,
    perturbed_equilibria,
    solve_manifold,
)
from ..spectral import (
    RieszProjection,
    eigensolve,
    eigenspace_hausdorff,
    eigenvalue_gap,
    norm_ratio_probe,
    projection_gap,
    resolvent_gap,
    riesz_projection,
    sector_resolvent_gap,
    sector_samples,
    semigroup_decay_check,
    slow_semigroup_check,
    slow_semigroup_gap,
    spectrum_separation,
)
from ..utils import run_in_threads
from ..utils.errors import (
    AssemblyInvariantError,
    BlowupError,
    CoefficientFloorError,
    ContourCollisionError,
    DegeneracyError,
    DimensionError,
    DomainError,
    EscapeError,
    HyperbolicityError,
    NonConvergenceError,
    NumericalFailureError,
    ProjectionError,
    QuadratureResolutionError,
    RangeError,
    SweepAbortedError,
)
from .config import RunConfig
from .fit import RateSeries, Row


logger = logging.getLogger(__name__)

QUANTITIES = (
    "resolvent",
    "projection",
    "eigenspace",
    "eigenvalue",
    "equilibria",
    "manifold",
    "attractor",
    "norm_ratio",
    "spectrum_gap",
    "separation",
    "sector",
    "semigroup",
    "slow_semigroup",
)

HARD_FAILURES = (
    AssemblyInvariantError,
    CoefficientFloorError,
    ContourCollisionError,
    DimensionError,
    NumericalFailureError,
    QuadratureResolutionError,
)
SOFT_FAILURES = (
    BlowupError,
    DegeneracyError,
    DomainError,
    EscapeError,
    HyperbolicityError,
    NonConvergenceError,
    ProjectionError,
    RangeError,
)

RANK_TOL = 1e-6
CONTRACTION_LIMIT = 0.9
TAU_RESOLUTION_TOL = 1e-2


class EpsilonCase:
    """Operator, reaction and derived objects at one epsilon, built on demand.

    One case serves every quantity measured at its epsilon. Shared objects
    keep the flags they raised and hand them to each measurement that uses
    them.
    """

    def __init__(self, config: RunConfig, eps: float, index: int = 0) -> None:
        self.config = config
        self.eps = eps
        self.index = index
        self.family = config.scale_family
        self.center = self.family.center
        self.reaction: Reaction = config.build_reaction()
        self.mesh = IntervalMesh.uniform(config.n)
        self.rng = np.random.default_rng([config.seed, index])
        self.flags: list[str] = []

    def note(self, *flags: str) -> None:
        """Record flags on the current measurement, once each."""
        for flag in flags:
            if flag not in self.flags:
                self.flags.append(flag)

    @cached_property
    def op(self) -> DiscreteOperator:
        """Assembled operator."""
        coeff = self.family.coefficients(self.mesh, self.eps, self.config.m0)
        return assemble(self.mesh, coeff)

    @cached_property
    def proj(self) -> AveragingProjection:
        """Averaging projection on the mesh."""
        return AveragingProjection.on(self.mesh)

    @cached_property
    def basis(self) -> ModalBasis:
        """Full eigendecomposition."""
        return ModalBasis.of(self.op)

    @cached_property
    def riesz(self) -> RieszProjection:
        """Quadrature projection around the limit eigenvalue."""
        return riesz_projection(self.op, self.center, n_quad=self.config.n_quad)

    @cached_property
    def limit_roots(self) -> list[Equilibrium]:
        """Equilibria of the limit ODE."""
        return limit_equilibria(self.reaction, self.center)

    @cached_property
    def _tau_flags(self) -> tuple[str, ...]:
        tau = self.family.tau(self.eps)
        resolved = self.family.resolved_tau(self.mesh, self.eps)
        if tau > 0.0 and abs(resolved - tau) > TAU_RESOLUTION_TOL * tau:
            return ("tau-resolution",)
        return ()

    @cached_property
    def _equilibria(self) -> tuple[list[PerturbedEquilibrium], tuple[str, ...]]:
        found = perturbed_equilibria(
            self.op,
            self.reaction,
            self.limit_roots,
            tol=self.config.newton_tol,
            max_iter=self.config.newton_max_iter,
        )
        flags = []
        if any(item.collided for item in found):
            flags.append("collision")
        if not all(item.unique for item in found):
            flags.append("non-unique")

        reduced = [
            float(self.basis.split(item.equilibrium.nodal(self.op.n))[0])
            for item in found
        ]
        if np.any(np.diff(reduced) <= 0.0):
            flags.append("order")
        return found, tuple(flags)

    @property
    def equilibria(self) -> list[PerturbedEquilibrium]:
        """Newton limits seeded by the limit equilibria."""
        found, flags = self._equilibria
        self.note(*flags)
        return found

    @property
    def reduced_equilibria(self) -> list[float]:
        """Slow coordinates of the perturbed equilibria, ascending."""
        return sorted(
            float(self.basis.split(item.equilibrium.nodal(self.op.n))[0])
            for item in self.equilibria
        )

    @cached_property
    def _manifold(self) -> tuple[GraphSection, tuple[str, ...]]:
        section = solve_manifold(
            self.op,
            self.reaction,
            self.config.manifold_settings(),
            [item.equilibrium for item in self.equilibria],
            basis=self.basis,
        )
        flags = []
        if section.clamped:
            flags.append("clamped")
        if section.lipschitz_quotient > section.lipschitz_bound:
            flags.append("lipschitz")
        if np.any(section.contraction_factors[1:] > CONTRACTION_LIMIT):
            flags.append("slow-contraction")
        return section, tuple(flags)

    @property
    def manifold(self) -> GraphSection:
        """Fixed point of the graph transform."""
        _, equilibrium_flags = self._equilibria
        section, flags = self._manifold
        self.note(*equilibrium_flags, *flags)
        return section

    def measure(self, quantity: str) -> float:
        """The error of ``quantity`` at this epsilon.

        Flags and random draws start afresh for every quantity, so a row
        does not depend on what else was measured before it.
        """
        self.flags = []
        self.rng = np.random.default_rng(
            [self.config.seed, self.index, QUANTITIES.index(quantity)]
        )
        self.note(*self._tau_flags)
        return MEASURES[quantity](self)


def _resolvent(case: EpsilonCase) -> float:
    return resolvent_gap(case.op, case.center, case.proj)


def _projection(case: EpsilonCase) -> float:
    q = case.riesz
    values = q.singular_values(case.op)
    if q.rank != 1 or (values.size > 1 and values[1] > RANK_TOL):
        case.note("rank")
    return projection_gap(q, case.proj, case.op)


def _eigenspace(case: EpsilonCase) -> float:
    dec = eigensolve(case.op, 2)
    return eigenspace_hausdorff(dec, case.op, case.proj, case.config.hausdorff_points)


def _eigenvalue(case: EpsilonCase) -> float:
    return eigenvalue_gap(eigensolve(case.op, 1), case.center)


def _equilibria(case: EpsilonCase) -> float:
    found = case.equilibria
    if len(found) != len(case.limit_roots):
        case.note("count")
    return max(item.distance for item in found)


def _manifold(case: EpsilonCase) -> float:
    return case.manifold.sup_norm


def _attractor(case: EpsilonCase) -> float:
    report = attractor_gap(
        case.op,
        case.manifold,
        [item.equilibrium for item in case.equilibria],
        case.limit_roots,
        case.riesz,
        case.proj,
        n_pts=case.config.hausdorff_points,
    )
    if sum(report.legs) < report.value * (1.0 - 1e-9):
        case.note("triangle")
    return report.value


def _norm_ratio(case: EpsilonCase) -> float:
    return norm_ratio_probe(case.op)


def _spectrum_gap(case: EpsilonCase) -> float:
    dec = eigensolve(case.op, 2)
    return float(dec.eigenvalues[1]) / case.family.p(case.eps)


def _separation(case: EpsilonCase) -> float:
    """R / lambda_2 with R = 2 + center; below one iff the circle separates."""
    dec = eigensolve(case.op, 2)
    radius = 2.0 + case.center
    if not spectrum_separation(dec, case.center, radius):
        case.note("unseparated")
    return radius / float(dec.eigenvalues[1])


def _sector(case: EpsilonCase) -> float:
    return max(
        sector_resolvent_gap(case.op, case.center, case.proj, mu)
        for mu in sector_samples(case.center)
    )


def _semigroup(case: EpsilonCase) -> float:
    dec = eigensolve(case.op, min(case.config.n_modes, case.op.n))
    z = dec.eigenvectors[:, 1:] @ case.rng.standard_normal(dec.k - 1)
    return semigroup_decay_check(dec, None, z).max_ratio


def _slow_semigroup(case: EpsilonCase) -> float:
    dec = eigensolve(case.op, 2)
    if not slow_semigroup_check(dec, case.center).passed:
        case.note("growth")
    return slow_semigroup_gap(dec, case.proj, case.center)


MEASURES: dict[str, Callable[[EpsilonCase], float]] = {
    "resolvent": _resolvent,
    "projection": _projection,
    "eigenspace": _eigenspace,
    "eigenvalue": _eigenvalue,
    "equilibria": _equilibria,
    "manifold": _manifold,
    "attractor": _attractor,
    "norm_ratio": _norm_ratio,
    "spectrum_gap": _spectrum_gap,
    "separation": _separation,
    "sector": _sector,
    "semigroup": _semigroup,
    "slow_semigroup": _slow_semigroup,
}


def _row(case: EpsilonCase, quantity: str) -> Row:
    """Measure one quantity on ``case``; soft failures give a NaN error and a flag."""
    try:
        error = case.measure(quantity)
    except HARD_FAILURES as e:
        raise SweepAbortedError(case.eps, e) from e
    except SOFT_FAILURES as e:
        logger.warning("%s at eps=%g: %s", quantity, case.eps, e)
        case.note(type(e).__name__)
        error = float("nan")

    return Row(
        eps=float(case.eps),
        delta=case.family.delta(case.eps),
        error=error,
        flag=";".join(case.flags),
    )


def measure_row(config: RunConfig, quantity: str, eps: float, index: int = 0) -> Row:
    """Measure one row on a fresh case.

    Raises
    ------
    SweepAbortedError
        On assembly, eigensolver or quadrature failures.
    """
    return _row(EpsilonCase(config, eps, index), quantity)


def sweep_all(
    config: RunConfig, quantities: Sequence[str], show_progress: bool = False
) -> list[RateSeries]:
    """Measure every quantity at every epsilon of the config's dyadic grid.

    Each epsilon builds one case shared by all quantities. Epsilons run
    concurrently on ``config.max_workers`` threads and rows are merged in
    epsilon order.
    """
    unknown = [q for q in quantities if q not in MEASURES]
    if unknown:
        raise ValueError(
            f"unknown quantity {unknown[0]!r}; expected one of {QUANTITIES}"
        )

    def _case_rows(eps: float, index: int) -> list[Row]:
        case = EpsilonCase(config, eps, index)
        return [_row(case, quantity) for quantity in quantities]

    jobs = [
        lambda eps=eps, index=index: _case_rows(eps, index)
        for index, eps in enumerate(config.eps_grid)
    ]
    per_eps = asyncio.run(
        run_in_threads(
            jobs,
            max_workers=config.max_workers,
            description=f"Sweeping {', '.join(quantities)}",
            show_progress=show_progress,
        )
    )
    return [
        RateSeries(quantity=quantity, rows=[rows[i] for rows in per_eps])
        for i, quantity in enumerate(quantities)
    ]


def sweep(
    config: RunConfig, quantity: str, show_progress: bool = False
) -> RateSeries:
    """Measure ``quantity`` at every epsilon of the config's dyadic grid."""
    return sweep_all(config, (quantity,), show_progress=show_progress)[0]


class ManifoldDiagnostics(pydantic.BaseModel):
    """Attraction and invariance checks of the manifold at one epsilon."""

    eps: float
    sup_norm: float
    contraction_factors: list[float]
    attraction_rates: list[float]
    lam2: float
    attraction_passed: bool
    invariance_start: float
    invariance_offset: float
    reduced_flow_gap: float


def off_equilibrium_start(reduced: Sequence[float], grid: np.ndarray) -> float:
    """Midpoint of the first two adjacent equilibria, else halfway to the grid edge."""
    if len(reduced) >= 2:
        return 0.5 * (reduced[0] + reduced[1])
    return 0.5 * (reduced[0] + float(grid[-1]))


def manifold_diagnostics(
    config: RunConfig, eps: float, n_initial: int = 5, t_final: float = 1.0
) -> ManifoldDiagnostics:
    """Exponential attraction from random states and on-manifold consistency.

    Initial states are v phi_1 + s(v) plus a random fast perturbation of
    energy 0.1, with v drawn uniformly inside the equilibrium range. The
    invariance check starts between two equilibria, so the trajectory moves.
    """
    case = EpsilonCase(config, eps)
    s = case.manifold
    basis = s.basis
    reduced = case.reduced_equilibria
    v = case.rng.uniform(min(reduced), max(reduced), n_initial)

    fast = case.rng.standard_normal((n_initial, s.n_modes - 1))
    fast *= 0.1 / s.energy(fast)[:, None]
    states = (
        np.multiply.outer(v, basis.slow_mode)
        + s.evaluate(v)
        + fast @ s.fast_vectors.T
    )
    attraction = exponential_attraction_check(case.op, case.reaction, s, states)

    v0 = off_equilibrium_start(reduced, s.v_grid)
    consistency = manifold_consistency(
        case.op, case.reaction, s, v0, t_final=t_final
    )
    return ManifoldDiagnostics(
        eps=float(eps),
        sup_norm=s.sup_norm,
        contraction_factors=[float(c) for c in s.contraction_factors],
        attraction_rates=[float(r) for r in attraction.rates],
        lam2=attraction.lam2,
        attraction_passed=attraction.passed,
        invariance_start=v0,
        invariance_offset=consistency.offset,
        reduced_flow_gap=consistency.slow_gap,
    )

"""Invariant manifold as the fixed point of the graph transform.

A section s maps the slow coordinate v (coefficient of phi_1) to a fast
state in span(phi_2, ..., phi_k), stored as fast-mode coefficients on a
uniform v-grid. One transform integrates the slow equation

    v' = -lambda_1 v + <phi_1, f(v phi_1 + s(v))>_M

backward from each grid value and evaluates the Duhamel integral of the
fast forcing along that backward trajectory.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.integrate
from pydantic import BaseModel, Field

from ..discretization import DiscreteOperator
from ..utils.errors import EscapeError, NonConvergenceError, RangeError
from .equilibria import Equilibrium
from .integrator import ModalBasis, integrate
from .reaction import Reaction


logger = logging.getLogger(__name__)

TAIL_TOL = 1e-10
SMALL_ARGUMENT = 1e-2
MIN_STEPS = 16


class ManifoldSettings(BaseModel):
    """Numerical parameters of the graph-transform iteration."""

    grid_points: int = Field(default=129, ge=3)
    grid_margin: float = Field(default=0.2, ge=0.0)
    dt: float = Field(default=0.01, gt=0.0)
    tol: float = Field(default=1e-9, gt=0.0)
    max_iter: int = Field(default=100, ge=1)
    n_modes: int = Field(default=12, ge=2)
    lipschitz_bound: float = Field(default=1.0, gt=0.0)
    dissipative_radius: float = Field(default=10.0, gt=0.0)
    horizon: float | None = Field(default=None, gt=0.0)


@dataclass(frozen=True)
class GraphSection:
    """Section v -> s(v) sampled on ``v_grid``.

    Row i of ``coeffs`` holds the coefficients of s(v_i) on phi_2..phi_k, so
    every value is M-orthogonal to phi_1 by construction.
    """

    v_grid: np.ndarray
    coeffs: np.ndarray
    basis: ModalBasis = field(repr=False)
    lipschitz_bound: float = 1.0
    increments: tuple[float, ...] = ()
    clamped: int = 0

    @classmethod
    def zero(
        cls,
        basis: ModalBasis,
        v_grid: np.ndarray,
        n_modes: int,
        lipschitz_bound: float = 1.0,
    ) -> "GraphSection":
        """s = 0 on ``v_grid`` with fast modes 2..n_modes."""
        n_fast = min(n_modes, basis.eigenvalues.size) - 1
        return cls(
            v_grid=np.asarray(v_grid, dtype=float),
            coeffs=np.zeros((len(v_grid), n_fast)),
            basis=basis,
            lipschitz_bound=lipschitz_bound,
        )

    @property
    def n_modes(self) -> int:
        """Slow mode plus the retained fast modes."""
        return self.coeffs.shape[1] + 1

    @property
    def fast_values(self) -> np.ndarray:
        """Eigenvalues of the retained fast modes."""
        return self.basis.eigenvalues[1 : self.n_modes]

    @property
    def fast_vectors(self) -> np.ndarray:
        """Retained fast modes as columns."""
        return self.basis.vectors[:, 1 : self.n_modes]

    @property
    def z_values(self) -> np.ndarray:
        """Nodal vectors s(v_i), one row per grid point."""
        return self.coeffs @ self.fast_vectors.T

    def energy(self, coeffs: np.ndarray) -> np.ndarray:
        """Energy norm of fast-mode coefficient rows."""
        return np.sqrt(np.sum(self.fast_values * coeffs**2, axis=-1))

    @property
    def sup_norm(self) -> float:
        """|||s|||, the largest energy norm over the grid."""
        return float(np.max(self.energy(self.coeffs)))

    @property
    def lipschitz_quotient(self) -> float:
        """Largest ||s(v_{i+1}) - s(v_i)|| / (v_{i+1} - v_i)."""
        jumps = self.energy(np.diff(self.coeffs, axis=0))
        return float(np.max(jumps / np.diff(self.v_grid)))

    @property
    def contraction_factors(self) -> np.ndarray:
        """Ratios of successive increments of the iteration that built s."""
        inc = np.asarray(self.increments)
        if inc.size < 2:
            return np.empty(0)
        return inc[1:] / np.where(inc[:-1] > 0.0, inc[:-1], np.inf)

    def coefficients_at(self, v: np.ndarray) -> np.ndarray:
        """Interpolate the coefficients piecewise linearly, clamping v to the grid."""
        v = np.clip(np.atleast_1d(v), self.v_grid[0], self.v_grid[-1])
        return np.stack(
            [np.interp(v, self.v_grid, col) for col in self.coeffs.T], axis=-1
        )

    def evaluate(self, v: np.ndarray) -> np.ndarray:
        """Nodal values s(v), one row per entry of ``v``."""
        return self.coefficients_at(v) @ self.fast_vectors.T

    def distance(self, other: "GraphSection") -> float:
        """Sup over the grid of the energy distance to ``other``."""
        return float(np.max(self.energy(self.coeffs - other.coeffs)))


def default_horizon(lam2: float) -> float:
    """Smallest T with e^{-lambda_2 T} <= 1e-10."""
    return -np.log(TAIL_TOL) / lam2


def _kernel_weights(values: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Weights (a, b) with int_0^dt e^{-lambda s} l(s) ds = a l(0) + b l(dt), l linear.

    Exact for the piecewise-linear interpolant of the forcing.
    """
    x = values * dt
    small = x < SMALL_ARGUMENT
    xs = np.where(small, 1.0, x)
    total = -np.expm1(-xs) / xs
    right = (1.0 - np.exp(-xs) * (1.0 + xs)) / xs**2
    # Series of the same two integrals around x = 0.
    total = np.where(
        small, 1.0 - x / 2.0 + x**2 / 6.0 - x**3 / 24.0 + x**4 / 120.0, total
    )
    right = np.where(
        small, 0.5 - x / 3.0 + x**2 / 8.0 - x**3 / 30.0 + x**4 / 144.0, right
    )
    return dt * (total - right), dt * right


class _SlowField:
    """Right-hand side of the slow equation and the fast forcing along a section."""

    def __init__(
        self, section: GraphSection, reaction: Reaction, radius: float
    ) -> None:
        basis = section.basis
        m = basis.op.M
        self.section = section
        self.reaction = reaction
        self.radius = radius
        self.lam1 = float(basis.eigenvalues[0])
        self.phi1 = basis.slow_mode
        self.slow_weight = m @ self.phi1
        self.fast_weight = m @ section.fast_vectors

    def states(self, v: np.ndarray) -> np.ndarray:
        u = np.multiply.outer(v, self.phi1) + self.section.evaluate(v)
        if np.max(np.abs(u)) > self.radius:
            raise EscapeError(
                f"state of size {np.max(np.abs(u)):.3g} left the ball of radius"
                f" {self.radius}"
            )
        return u

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return -self.lam1 * v + self.reaction(self.states(v)) @ self.slow_weight

    def forcing(self, v: np.ndarray) -> np.ndarray:
        """Fast-mode coefficients of f(v phi_1 + s(v)), one row per v."""
        return self.reaction(self.states(v)) @ self.fast_weight


def graph_transform(
    op: DiscreteOperator,
    reaction: Reaction,
    s: GraphSection,
    horizon: float | None = None,
    dt: float = 0.01,
    dissipative_radius: float = 10.0,
) -> GraphSection:
    """Apply the graph transform once.

    Parameters
    ----------
    op : DiscreteOperator
        Operator whose eigenbasis ``s`` is expressed in.
    reaction : Reaction
        Nonlinearity.
    s : GraphSection
        Current section.
    horizon : float | None
        Backward integration length T; ``default_horizon`` of lambda_2 when
        omitted.
    dt : float
        Largest step of the backward RK4 integration and of the Duhamel
        quadrature; at least ``MIN_STEPS`` steps cover the horizon.
    dissipative_radius : float
        Sup-norm bound on states along backward trajectories.

    Returns
    -------
    GraphSection
        The transformed section on the same grid.
    """
    op.mesh.check_nodal(s.basis.slow_mode)
    values = s.basis.eigenvalues
    if horizon is None:
        horizon = default_horizon(float(values[1]))

    n_steps = max(int(np.ceil(horizon / dt)), MIN_STEPS)
    h = horizon / n_steps
    lo, hi = s.v_grid[0], s.v_grid[-1]
    slow = _SlowField(s, reaction, dissipative_radius)

    v = s.v_grid.copy()
    clamped = np.zeros(v.size, dtype=bool)
    forcing = np.empty((n_steps + 1, v.size, s.n_modes - 1))
    forcing[0] = slow.forcing(v)
    for k in range(1, n_steps + 1):
        # Backward in time: dv/dsigma = -F(v) with sigma = tau - r.
        k1 = -slow(v)
        k2 = -slow(v + 0.5 * h * k1)
        k3 = -slow(v + 0.5 * h * k2)
        k4 = -slow(v + h * k3)
        v = v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        outside = (v < lo) | (v > hi)
        clamped |= outside
        v = np.clip(v, lo, hi)
        forcing[k] = slow.forcing(v)

    left, right = _kernel_weights(s.fast_values, h)
    sigma = h * np.arange(n_steps)
    decay = np.exp(-np.outer(sigma, s.fast_values))
    coeffs = np.einsum("kj,kmj->mj", decay * left, forcing[:-1]) + np.einsum(
        "kj,kmj->mj", decay * right, forcing[1:]
    )

    n_clamped = int(np.count_nonzero(clamped))
    if n_clamped:
        logger.warning(
            "clamped %d of %d backward trajectories at the grid edge",
            n_clamped,
            v.size,
        )

    out = replace(s, coeffs=coeffs, clamped=n_clamped)
    if out.lipschitz_quotient > s.lipschitz_bound:
        logger.warning(
            "lipschitz quotient %.3g exceeds the bound %.3g",
            out.lipschitz_quotient,
            s.lipschitz_bound,
        )
    return out


def grid_for(
    basis: ModalBasis,
    equilibria: list[Equilibrium],
    n_points: int = 129,
    margin: float = 0.2,
) -> np.ndarray:
    """Uniform v-grid over the reduced coordinates of ``equilibria``, widened."""
    n = basis.op.n
    reduced = [float(basis.split(eq.nodal(n))[0]) for eq in equilibria]
    lo, hi = min(reduced), max(reduced)
    half = 0.5 * (hi - lo) if hi > lo else 1.0
    mid = 0.5 * (hi + lo)
    width = (1.0 + margin) * half
    return np.linspace(mid - width, mid + width, n_points)


def solve_manifold(
    op: DiscreteOperator,
    reaction: Reaction,
    settings: ManifoldSettings,
    equilibria: list[Equilibrium],
    basis: ModalBasis | None = None,
) -> GraphSection:
    """Iterate the graph transform from s = 0 to its fixed point.

    The grid spans the reduced coordinates of ``equilibria``. Increments
    are sup-distances between successive iterates.
    """
    basis = ModalBasis.of(op) if basis is None else basis
    grid = grid_for(basis, equilibria, settings.grid_points, settings.grid_margin)
    s = GraphSection.zero(basis, grid, settings.n_modes, settings.lipschitz_bound)

    increments: list[float] = []
    for it in range(1, settings.max_iter + 1):
        nxt = graph_transform(
            op,
            reaction,
            s,
            horizon=settings.horizon,
            dt=settings.dt,
            dissipative_radius=settings.dissipative_radius,
        )
        increments.append(nxt.distance(s))
        s = nxt
        if increments[-1] <= settings.tol:
            logger.info(
                "graph transform converged in %d iterations, |||s||| = %.3e",
                it,
                s.sup_norm,
            )
            return replace(s, increments=tuple(increments))

    raise NonConvergenceError(
        f"graph transform did not converge in {settings.max_iter} iterations"
        f" (last increment {increments[-1]:.3e})"
    )


def reduced_flow(
    reaction: Reaction, s: GraphSection, v0: float, times: np.ndarray
) -> np.ndarray:
    """Solve v' = -lambda_1 v + <phi_1, f(v phi_1 + s(v))>_M at ``times``."""
    slow = _SlowField(s, reaction, np.inf)
    times = np.asarray(times, dtype=float)
    sol = scipy.integrate.solve_ivp(
        lambda _, v: slow(v),
        (0.0, float(times[-1])),
        [v0],
        t_eval=times,
        rtol=1e-10,
        atol=1e-12,
    )
    if not sol.success:
        raise NonConvergenceError(f"reduced flow failed: {sol.message}")
    return sol.y[0]


def _offsets(s: GraphSection, states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Slow coordinates and energy distances of the fast parts to s(v)."""
    c = s.basis.coefficients(states)
    v = c[:, 0]
    fast = c[:, 1:].copy()
    fast[:, : s.n_modes - 1] -= s.coefficients_at(v)
    energy = np.sqrt(np.sum(s.basis.eigenvalues[1:] * fast**2, axis=1))
    return v, energy


@dataclass(frozen=True, slots=True)
class ConsistencyReport:
    """Invariance and reduced-flow agreement of an on-manifold trajectory."""

    offset: float
    slow_gap: float


def manifold_consistency(
    op: DiscreteOperator,
    reaction: Reaction,
    s: GraphSection,
    v0: float,
    t_final: float = 1.0,
    dt: float = 1e-3,
) -> ConsistencyReport:
    """Integrate from v0 phi_1 + s(v0) and compare with the manifold and reduced flow.

    ``offset`` is the largest energy distance of the fast part to s(v(t));
    ``slow_gap`` the largest |v(t) - v_reduced(t)|.
    """
    if not s.v_grid[0] <= v0 <= s.v_grid[-1]:
        raise RangeError(f"v0={v0} outside the section grid")

    u0 = v0 * s.basis.slow_mode + s.evaluate(np.array([v0]))[0]
    traj = integrate(op, reaction, u0, t_final, dt, basis=s.basis)
    v, offsets = _offsets(s, traj.states)
    reduced = reduced_flow(reaction, s, v0, traj.times)
    return ConsistencyReport(
        offset=float(np.max(offsets)), slow_gap=float(np.max(np.abs(v - reduced)))
    )


@dataclass(frozen=True, slots=True)
class AttractionReport:
    """Fitted decay rates of the distance to the manifold, one per initial state."""

    rates: np.ndarray
    lam2: float
    monotone: np.ndarray
    max_offsets: np.ndarray

    @property
    def passed(self) -> bool:
        """Every rate at least half the fast gap lambda_2."""
        return bool(np.all(self.rates >= 0.5 * self.lam2))


def exponential_attraction_check(
    op: DiscreteOperator,
    reaction: Reaction,
    s: GraphSection,
    u0_batch: np.ndarray,
    window: tuple[float, float] = (0.1, 1.0),
    floor: float = 1e-7,
    n_steps: int = 200,
) -> AttractionReport:
    """Fit the decay rate of ||z(t) - s(v(t))|| for each initial state.

    Time runs over [0, t_fast] with t_fast = min(1, 10 / lambda_2). The rate
    is minus the least-squares slope of log||xi|| over ``window`` times
    t_fast, using samples above ``floor`` times the initial offset. A state
    already on the manifold gets rate inf.
    """
    lam2 = float(s.basis.eigenvalues[1])
    t_fast = min(1.0, 10.0 / lam2)
    dt = t_fast / n_steps

    rates, monotone, peaks = [], [], []
    for u0 in np.atleast_2d(u0_batch):
        traj = integrate(op, reaction, u0, t_fast, dt, basis=s.basis, dt_max=dt)
        _, xi = _offsets(s, traj.states)
        peaks.append(float(np.max(xi)))

        t = traj.times
        usable = (
            (t >= window[0] * t_fast)
            & (t <= window[1] * t_fast)
            & (xi > floor * xi[0])
        )
        if xi[0] == 0.0 or np.count_nonzero(usable) < 3:
            rates.append(np.inf)
            monotone.append(True)
            continue

        slope, _ = np.polyfit(t[usable], np.log(xi[usable]), 1)
        rates.append(-float(slope))
        is_monotone = bool(np.all(np.diff(xi[usable]) <= 0.01 * xi[usable][:-1]))
        if not is_monotone:
            logger.warning("distance to the manifold grows after the transient")
        monotone.append(is_monotone)

    return AttractionReport(
        rates=np.array(rates),
        lam2=lam2,
        monotone=np.array(monotone),
        max_offsets=np.array(peaks),
    )

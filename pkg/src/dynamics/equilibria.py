"""Equilibria of the limit ODE and of the discrete perturbed problem."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from ..discretization import DiscreteOperator, norm
from ..utils.errors import DomainError, HyperbolicityError, NonConvergenceError
from .reaction import Reaction


logger = logging.getLogger(__name__)

ROOT_TOL = 1e-12
HYPERBOLICITY_TOL = 1e-8
DUPLICATE_TOL = 1e-10
NEWTON_TOL = 1e-10
MAX_HALVINGS = 8
COLLISION_TOL = 1e-8


@dataclass(frozen=True, slots=True)
class Equilibrium:
    """A stationary state: scalar for the limit ODE, nodal vector otherwise."""

    value: float | np.ndarray
    margin: float
    stable: bool
    residual: float = 0.0

    def nodal(self, n: int) -> np.ndarray:
        """The state as a nodal vector of length ``n``."""
        if np.ndim(self.value) == 0:
            return float(self.value) * np.ones(n)
        return np.asarray(self.value)


@dataclass(frozen=True, slots=True)
class PerturbedEquilibrium:
    """Newton limit from one seed, with its distance to the seed and diagnostics."""

    equilibrium: Equilibrium
    distance: float
    iterations: int
    unique: bool = True
    collided: bool = False


def _polish(reaction: Reaction, center: float, root: float) -> float:
    """Two Newton steps on center * u - f(u)."""
    for _ in range(2):
        slope = center - float(reaction.derivative(np.array(root)))
        if slope == 0.0:
            break
        root -= (center * root - float(reaction(np.array(root)))) / slope
    return root


def limit_equilibria(
    reaction: Reaction,
    center: float,
    bracket: tuple[float, float] = (-3.0, 3.0),
    n_scan: int = 1000,
) -> list[Equilibrium]:
    """Roots of center * u = f(u), sorted ascending.

    Parameters
    ----------
    reaction : Reaction
        Nonlinearity f.
    center : float
        Limit eigenvalue lambda + V0.
    bracket : tuple[float, float]
        Scan interval; must cover [-radius, radius] of the reaction.
    n_scan : int
        Number of scan subintervals.

    Returns
    -------
    list[Equilibrium]
        Hyperbolic roots; stable iff center - f'(u) > 0.
    """
    lo, hi = bracket
    if not (lo < -reaction.radius and hi > reaction.radius):
        raise DomainError(
            f"bracket {bracket} does not cover the dissipative radius {reaction.radius}"
        )
    if n_scan < 2:
        raise DomainError(f"n_scan must be at least 2, got {n_scan}")

    def g(u):
        return center * u - reaction(np.asarray(u))

    grid = np.linspace(lo, hi, n_scan + 1)
    values = g(grid)
    roots: list[float] = []
    for i in range(n_scan):
        if values[i] == 0.0:
            roots.append(float(grid[i]))
        elif values[i] * values[i + 1] < 0.0:
            root = scipy.optimize.brentq(
                lambda u: float(g(u)), grid[i], grid[i + 1], xtol=1e-15
            )
            roots.append(_polish(reaction, center, root))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))

    unique: list[float] = []
    for root in sorted(roots):
        if not unique or root - unique[-1] > DUPLICATE_TOL:
            unique.append(root)

    out = []
    for root in unique:
        margin = center - float(reaction.derivative(np.array(root)))
        if abs(margin) <= HYPERBOLICITY_TOL:
            raise HyperbolicityError(f"root u={root:.12g} has margin {margin:.3e}")
        out.append(
            Equilibrium(
                value=root,
                margin=abs(margin),
                stable=margin > 0.0,
                residual=abs(float(g(root))),
            )
        )
    return out


def _jacobian_band(op: DiscreteOperator, slope: np.ndarray) -> np.ndarray:
    """(1, 1) banded storage of G - M diag(slope), which is not symmetric."""
    g_diag, g_off = op.band("G")
    m_diag, m_off = op.band("M")
    ab = np.zeros((3, op.n))
    ab[0, 1:] = g_off - m_off * slope[1:]
    ab[1, :] = g_diag - m_diag * slope
    ab[2, :-1] = g_off - m_off * slope[:-1]
    return ab


def _residual(op: DiscreteOperator, reaction: Reaction, u: np.ndarray) -> np.ndarray:
    return op.apply(u) - op.M @ reaction(u)


def _dual_norm(op: DiscreteOperator, r: np.ndarray) -> float:
    """sqrt(r^T G^{-1} r)."""
    return float(np.sqrt(max(r @ op.solve(r), 0.0)))


def newton(
    op: DiscreteOperator,
    reaction: Reaction,
    u0: np.ndarray,
    tol: float = NEWTON_TOL,
    max_iter: int = 50,
) -> tuple[np.ndarray, float, int]:
    """Damped Newton on G u - M f(u) = 0.

    Returns
    -------
    tuple[np.ndarray, float, int]
        (solution, dual-norm residual, iterations)
    """
    u = op.mesh.check_nodal(u0).astype(float)
    r = _residual(op, reaction, u)
    res = _dual_norm(op, r)
    for it in range(max_iter):
        if res <= tol:
            return u, res, it

        ab = _jacobian_band(op, reaction.derivative(u))
        try:
            delta = scipy.linalg.solve_banded((1, 1), ab, -r)
        except np.linalg.LinAlgError as e:
            raise NonConvergenceError(f"singular Newton Jacobian at step {it}") from e

        step = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = u + step * delta
            r_trial = _residual(op, reaction, trial)
            res_trial = _dual_norm(op, r_trial)
            if res_trial < res:
                break
            step *= 0.5
        else:
            raise NonConvergenceError(
                f"no damped Newton step reduced the residual {res:.3e} at step {it}"
            )
        u, r, res = trial, r_trial, res_trial

    if res <= tol:
        return u, res, max_iter
    raise NonConvergenceError(
        f"Newton did not reach {tol:.1e} in {max_iter} steps (residual {res:.3e})"
    )


def linearization_margin(
    op: DiscreteOperator, reaction: Reaction, u: np.ndarray
) -> tuple[float, bool]:
    """min |Re mu| over the spectrum of (G - M diag f'(u), M), and stability."""
    jac = op.G - op.M * reaction.derivative(u)[None, :]
    values = scipy.linalg.eigvals(jac, op.M)
    real = np.real(values)
    return float(np.min(np.abs(real))), bool(np.all(real > 0.0))


def perturbed_equilibria(
    op: DiscreteOperator,
    reaction: Reaction,
    seeds: list[Equilibrium],
    tol: float = NEWTON_TOL,
    max_iter: int = 50,
    perturbation: float = 0.1,
) -> list[PerturbedEquilibrium]:
    """Newton from each seed, embedded as a constant nodal vector.

    Local uniqueness is probed by restarting from the seed shifted by
    +-``perturbation`` times the distance found; the result is flagged
    ``unique=False`` when a restart lands elsewhere.
    """
    found: list[PerturbedEquilibrium] = []
    for seed in seeds:
        start = seed.nodal(op.n)
        u, res, its = newton(op, reaction, start, tol=tol, max_iter=max_iter)
        distance = norm(u - start, op)

        shift = perturbation * max(distance, 1e-3)
        unique = True
        for sign in (-1.0, 1.0):
            other, _, _ = newton(op, reaction, start + sign * shift, tol, max_iter)
            if norm(other - u, op) > COLLISION_TOL:
                unique = False
                logger.warning(
                    "seed %.6g: restart at %+.1e converged elsewhere",
                    float(np.mean(start)),
                    sign * shift,
                )

        margin, stable = linearization_margin(op, reaction, u)
        if margin <= HYPERBOLICITY_TOL:
            raise HyperbolicityError(f"equilibrium near seed has margin {margin:.3e}")

        collided = any(
            norm(u - prev.equilibrium.nodal(op.n), op) <= COLLISION_TOL
            for prev in found
        )
        if collided:
            logger.warning(
                "seed %.6g converged onto an equilibrium already found",
                float(np.mean(start)),
            )

        found.append(
            PerturbedEquilibrium(
                equilibrium=Equilibrium(
                    value=u, margin=margin, stable=stable, residual=res
                ),
                distance=distance,
                iterations=its,
                unique=unique,
                collided=collided,
            )
        )
    return found

"""Scale families p_eps, V_eps and their composite rate tau(eps) + p(eps)^(-1/2)."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.integrate

from ..discretization import CoefficientField, IntervalMesh, midpoint_lp_norm
from ..utils.errors import ConfigError


Profile = Callable[[np.ndarray], np.ndarray]


def _sine(x: np.ndarray) -> np.ndarray:
    return np.sin(2.0 * np.pi * x)


def _zero(x: np.ndarray) -> np.ndarray:
    return 0.0 * x


@dataclass(frozen=True)
class ScaleFamily:
    """p_eps = p_bar eps^(-a) and V_eps = V0 + eps^b w on (0, 1).

    ``tau`` is eps^b times the L^1 norm of w, so tau(eps) = ||V_eps - V0||_{L^1}.
    """

    name: str
    p_bar: float
    a: float
    b: float
    v0: float
    shift: float
    w: Profile = field(repr=False)
    default_gain: float = 1.0

    @cached_property
    def w_norm(self) -> float:
        """||w||_{L^1(0, 1)} by adaptive quadrature."""
        value, _ = scipy.integrate.quad(
            lambda x: abs(float(self.w(np.asarray(x)))), 0.0, 1.0, limit=200
        )
        return value

    @property
    def center(self) -> float:
        """lambda + V0, the eigenvalue of the limit problem."""
        return self.shift + self.v0

    def p(self, eps: float) -> float:
        """Diffusion level p(eps)."""
        return self.p_bar * eps ** (-self.a)

    def tau(self, eps: float) -> float:
        """Potential deviation tau(eps)."""
        return eps**self.b * self.w_norm

    def resolved_tau(self, mesh: IntervalMesh, eps: float) -> float:
        """tau(eps) by the midpoint rule on ``mesh``, as the assembly samples V."""
        return eps**self.b * midpoint_lp_norm(mesh, self.w)

    def delta(self, eps: float) -> float:
        """tau(eps) + p(eps)^(-1/2)."""
        return self.tau(eps) + self.p(eps) ** -0.5

    def coefficients(
        self, mesh: IntervalMesh, eps: float, floor: float
    ) -> CoefficientField:
        """Coefficient field at ``eps`` sampled on ``mesh``."""
        p = self.p(eps)
        scale = eps**self.b
        return CoefficientField.from_profiles(
            mesh,
            diffusion=lambda x: p + 0.0 * x,
            potential=lambda x: self.v0 + scale * self.w(x),
            shift=self.shift,
            floor=floor,
        )


FAMILIES: dict[str, ScaleFamily] = {
    "f1": ScaleFamily(name="f1", p_bar=1.0, a=1.0, b=1.0, v0=0.0, shift=0.5, w=_sine),
    "f2": ScaleFamily(
        name="f2",
        p_bar=1.0,
        a=1.0,
        b=0.25,
        v0=0.0,
        shift=1.5,
        w=_sine,
        default_gain=2.0,
    ),
    "const": ScaleFamily(
        name="const", p_bar=1.0, a=1.0, b=1.0, v0=0.0, shift=0.5, w=_zero
    ),
}


def get_family(name: str) -> ScaleFamily:
    """Look up a family by name."""
    try:
        return FAMILIES[name]
    except KeyError as e:
        raise ConfigError(
            f"unknown family {name!r}; expected one of {sorted(FAMILIES)}"
        ) from e


def dyadic_grid(eps_hi: float, eps_lo: float) -> np.ndarray:
    """eps_hi, eps_hi / 2, ... down to eps_lo, strictly decreasing."""
    count = int(np.floor(np.log2(eps_hi / eps_lo) + 1e-9)) + 1
    return eps_hi * 2.0 ** -np.arange(count)

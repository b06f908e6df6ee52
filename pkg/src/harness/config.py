"""Run configuration: flat ``key = value`` files plus command-line overrides."""

from pathlib import Path
from typing import Any, Literal

import numpy as np
import pydantic
from pydantic import Field

from ..dynamics import ManifoldSettings, Reaction, cubic, linear
from ..utils.errors import ConfigError
from .families import ScaleFamily, dyadic_grid, get_family


MIN_GRID_LENGTH = 5


class RunConfig(pydantic.BaseModel):
    """Type-friendly collection of sweep parameters."""

    model_config = pydantic.ConfigDict(extra="forbid", frozen=True)

    # Discretization and sweep
    n: int = Field(default=256, ge=2)
    eps_hi: float = Field(default=2.0**-2, gt=0.0)
    eps_lo: float = Field(default=2.0**-10, gt=0.0)
    family: Literal["f1", "f2", "const"] = "f1"
    m0: float = Field(default=0.2, gt=0.0)

    # Reaction
    reaction: Literal["cubic", "linear"] = "cubic"
    reaction_gain: float | None = None
    linear_rate: float = Field(default=-0.25, lt=0.0)

    # Spectral
    n_modes: int = Field(default=12, ge=2)
    n_quad: int = Field(default=32, ge=2)
    hausdorff_points: int = Field(default=65, ge=2)

    # Manifold
    grid_points: int = Field(default=129, ge=3)
    grid_margin: float = Field(default=0.2, ge=0.0)
    manifold_dt: float = Field(default=0.01, gt=0.0)
    manifold_tol: float = Field(default=1e-9, gt=0.0)
    manifold_max_iter: int = Field(default=100, ge=1)
    lipschitz_bound: float = Field(default=1.0, gt=0.0)
    dissipative_radius: float = Field(default=10.0, gt=0.0)

    # Equilibria and time stepping
    newton_tol: float = Field(default=1e-10, gt=0.0)
    newton_max_iter: int = Field(default=50, ge=1)
    dt_max: float = Field(default=0.1, gt=0.0)

    # Fitting and output
    slope_floor: float = 0.9
    seed: int = 0
    out: Path = Path("results")
    max_workers: int = Field(default=4, ge=1)

    @pydantic.model_validator(mode="after")
    def _check_grid(self) -> "RunConfig":
        """eps_hi > eps_lo and at least five dyadic points between them."""
        if not self.eps_hi > self.eps_lo:
            raise ValueError(f"eps_hi={self.eps_hi} must exceed eps_lo={self.eps_lo}")
        if self.n_quad % 2:
            raise ValueError(f"n_quad must be even, got {self.n_quad}")
        if len(dyadic_grid(self.eps_hi, self.eps_lo)) < MIN_GRID_LENGTH:
            raise ValueError(
                f"eps grid [{self.eps_lo}, {self.eps_hi}] has fewer than"
                f" {MIN_GRID_LENGTH} dyadic points"
            )
        return self

    @property
    def eps_grid(self) -> np.ndarray:
        """Dyadic eps values from eps_hi down to eps_lo."""
        return dyadic_grid(self.eps_hi, self.eps_lo)

    @property
    def scale_family(self) -> ScaleFamily:
        """The selected family."""
        return get_family(self.family)

    def build_reaction(self) -> Reaction:
        """Cubic with the family's default gain unless ``reaction_gain`` is set."""
        if self.reaction == "linear":
            return linear(self.linear_rate)
        gain = self.reaction_gain
        return cubic(self.scale_family.default_gain if gain is None else gain)

    def manifold_settings(self) -> ManifoldSettings:
        """Graph-transform parameters."""
        return ManifoldSettings(
            grid_points=self.grid_points,
            grid_margin=self.grid_margin,
            dt=self.manifold_dt,
            tol=self.manifold_tol,
            max_iter=self.manifold_max_iter,
            n_modes=self.n_modes,
            lipschitz_bound=self.lipschitz_bound,
            dissipative_radius=self.dissipative_radius,
        )

    @staticmethod
    def _validate(data: dict[str, Any]) -> "RunConfig":
        try:
            return RunConfig(**data)
        except pydantic.ValidationError as e:
            raise ConfigError(f"invalid configuration:\n{e}") from e

    @staticmethod
    def from_file(path: str | Path) -> "RunConfig":
        """Parse ``key = value`` lines; ``#`` starts a comment."""
        data: dict[str, str] = {}
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e

        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            data[key.strip()] = value.strip()

        return RunConfig._validate(data)

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Copy with every non-None override applied and revalidated."""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig._validate(data)

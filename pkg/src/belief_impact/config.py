"""Run configuration: loaded from a TOML file, environment and CLI overrides."""

from __future__ import annotations

import tomllib
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from belief_impact.errors import ConfigurationError
from belief_impact.models.policy import PolicyConfig
from belief_impact.models.scenario import Audience, ScenarioSpec
from belief_impact.models.viewer import Covariance

Matrix = list[list[float]]


def _parse_matrix(value: Any, dim: int | None) -> Any:
    """Accept a row-major list of lists or ``{"diag": [...]}`` / ``{"diag": x}``."""
    if isinstance(value, dict):
        if set(value) != {"diag"}:
            raise ValueError("matrix shorthand must be {diag = [...]}")
        diag = value["diag"]
        if isinstance(diag, (int, float)):
            if dim is None:
                raise ValueError("scalar diag needs dim")
            diag = [float(diag)] * dim
        return np.diag(np.asarray(diag, dtype=float)).tolist()
    return value


class ScenarioSettings(BaseModel):
    """``[scenario]`` section; defaults reproduce the reference numerical setup."""

    model_config = ConfigDict(extra="forbid")

    dim: int = Field(2, ge=1)
    sigma: Matrix = Field(default_factory=lambda: [[1.0, 0.0], [0.0, 1.0]])
    sigma_s: Matrix = Field(default_factory=lambda: [[0.5, 0.0], [0.0, 0.5]])
    mu_spread: Matrix = Field(default_factory=lambda: [[0.1, 0.0], [0.0, 0.1]])
    n_viewers: int = Field(500, ge=1)
    audience: Audience = Audience.INDIFFERENT
    heterogeneity: float = Field(0.0, ge=0)

    @model_validator(mode="before")
    @classmethod
    def _expand_shorthand(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        dim = data.get("dim")
        for key in ("sigma", "sigma_s", "mu_spread"):
            if key in data:
                data[key] = _parse_matrix(data[key], dim)
        return data

    @model_validator(mode="after")
    def _check_shapes(self) -> ScenarioSettings:
        for key in ("sigma", "sigma_s", "mu_spread"):
            rows = getattr(self, key)
            if len(rows) != self.dim or any(len(row) != self.dim for row in rows):
                raise ValueError(f"scenario.{key} must be {self.dim}x{self.dim}")
        return self

    def to_spec(self, d_min: float = 0.0) -> ScenarioSpec:
        return ScenarioSpec(
            dim=self.dim,
            sigma=Covariance(np.asarray(self.sigma)),
            sigma_s=Covariance(np.asarray(self.sigma_s)),
            mu_spread=np.asarray(self.mu_spread),
            n_viewers=self.n_viewers,
            audience=self.audience,
            d_min=d_min,
            heterogeneity=self.heterogeneity,
        )


class GridSettings(BaseModel):
    """``[epsilon_grid]`` section: inclusive ``start:step:stop``."""

    model_config = ConfigDict(extra="forbid")

    start: float = Field(0.1, gt=0)
    stop: float = Field(3.0, gt=0)
    step: float = Field(0.1, gt=0)

    @model_validator(mode="after")
    def _check_order(self) -> GridSettings:
        if not self.start < self.stop:
            raise ValueError("epsilon_grid.start must be below epsilon_grid.stop")
        return self

    def values(self) -> list[float]:
        count = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + k * self.step, 12) for k in range(count)]


class RunConfig(BaseSettings):
    """Everything a batch run depends on.

    Precedence: explicit overrides > TOML file > ``BELIEF_IMPACT_*``
    environment variables (``__`` separates nested keys) > defaults.
    """

    scenario: ScenarioSettings = Field(default_factory=ScenarioSettings)
    policy: PolicyConfig = Field(default_factory=PolicyConfig)
    epsilon_grid: GridSettings = Field(default_factory=GridSettings)

    # ── Monte Carlo ──────────────────────────────────────
    n_draws: int = Field(2000, ge=1)
    n_samples: int = Field(2000, ge=1)
    seed: int | None = Field(None, ge=0, lt=2**64)

    # ── Output ───────────────────────────────────────────
    output_dir: Path = Path("results")
    emit_svg: bool = False
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"

    model_config = SettingsConfigDict(
        env_prefix="BELIEF_IMPACT_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="forbid",
    )

    @field_validator("log_level", mode="before")
    @classmethod
    def _upper(cls, value: Any) -> Any:
        return value.upper() if isinstance(value, str) else value

    def scenario_spec(self) -> ScenarioSpec:
        return self.scenario.to_spec(d_min=self.policy.d_min)

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigurationError("seed is required: set it in the config file or pass --seed")
        return self.seed


def load_run_config(path: Path | str | None = None, **overrides: Any) -> RunConfig:
    """Build a :class:`RunConfig` from an optional TOML file plus overrides.

    ``None`` overrides are ignored so CLI flags left unset do not mask
    file values.
    """
    data: dict[str, Any] = {}
    if path is not None:
        with Path(path).open("rb") as fh:
            data = tomllib.load(fh)
    data.update({key: value for key, value in overrides.items() if value is not None})
    return RunConfig(**data)

"""Configuration management with Pydantic validation.

Supports four configuration sources (in priority order):
1. Command-line flags
2. Environment variables
3. YAML config file
4. Default values
"""

import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .models.params import ModelParams
from .solvers.ghe import ImexConfig
from .solvers.grid import Grid1D
from .solvers.initial import INITIAL_CONDITIONS


class GridConfig(BaseModel):
    """Periodic grid of the relaxation runs."""

    model_config = ConfigDict(extra="forbid")

    n_cells: int = Field(
        default=2048,
        ge=8,
        description="Number of cells"
    )
    length: float = Field(
        default=1.0,
        gt=0,
        description="Domain length L"
    )

    def to_grid(self, n_cells: Optional[int] = None) -> Grid1D:
        """Grid with this length and n_cells (the configured count by default)."""
        return Grid1D(n_cells=n_cells or self.n_cells, length=self.length)


class InitialConfig(BaseModel):
    """Initial condition."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(
        default="smooth_wave",
        description="smooth_wave, equilibrium, heat_pulse or manufactured"
    )
    amplitude: float = Field(
        default=0.1,
        ge=0,
        lt=1,
        description="Perturbation amplitude"
    )

    @field_validator("name")
    @classmethod
    def known_name(cls, v: str) -> str:
        """Reject unknown initial conditions at parse time."""
        if v not in INITIAL_CONDITIONS:
            raise ValueError(f"unknown initial condition {v!r}; choose from {sorted(INITIAL_CONDITIONS)}")
        return v


class ExperimentConfig(BaseModel):
    """Relaxation-limit experiments."""

    model_config = ConfigDict(extra="forbid")

    epsilons: List[float] = Field(
        default_factory=lambda: [0.08, 0.04, 0.02, 0.01],
        description="Relaxation times of the sweep"
    )
    nsf_refinement: int = Field(
        default=2,
        ge=1,
        description="The converge reference grid is this many times finer"
    )
    snapshots: int = Field(
        default=4,
        ge=1,
        description="Equally spaced comparison times in (0, t_end]"
    )
    well_prepared: bool = Field(
        default=True,
        description="Start from the closure values (False sets V^II = 0)"
    )
    spatial_guard: bool = Field(
        default=True,
        description="Repeat each run at N/2 to estimate the spatial error"
    )
    guard_fraction: float = Field(
        default=0.1,
        gt=0,
        description="Largest accepted spatial error relative to the eps-gap"
    )
    residual_center: float = Field(
        default=0.5,
        gt=0,
        lt=1,
        description="Residual time as a fraction of t_end"
    )
    residual_spacing: float = Field(
        default=0.05,
        gt=0,
        lt=0.5,
        description="Snapshot spacing of the time derivative as a fraction of t_end"
    )

    @field_validator("epsilons")
    @classmethod
    def positive_epsilons(cls, v: List[float]) -> List[float]:
        """Every relaxation time must be positive."""
        if any(e <= 0 for e in v):
            raise ValueError("relaxation times must be positive")
        return v

    @model_validator(mode="after")
    def residual_window(self) -> "ExperimentConfig":
        """The centered difference must stay inside (0, t_end]."""
        if self.residual_center - self.residual_spacing <= 0 or \
                self.residual_center + self.residual_spacing > 1:
            raise ValueError("residual_center +/- residual_spacing must lie in (0, 1]")
        return self


class StructureConfig(BaseModel):
    """Pointwise structure checks."""

    model_config = ConfigDict(extra="forbid")

    dims: List[int] = Field(
        default_factory=lambda: [1, 2, 3],
        description="Spatial dimensions to check"
    )
    samples: int = Field(
        default=100,
        ge=1,
        description="Random states per check"
    )
    budget: Optional[int] = Field(
        default=None,
        ge=0,
        description="State budget per sampler (unbounded when empty)"
    )
    concavity_trials: int = Field(
        default=10_000,
        ge=1,
        description="Sampled pairs per midpoint-concavity test"
    )
    solver_check: bool = Field(
        default=True,
        description="Include the entropy check on a short solver run"
    )

    @field_validator("dims")
    @classmethod
    def valid_dims(cls, v: List[int]) -> List[int]:
        if not v or any(d not in (1, 2, 3) for d in v):
            raise ValueError("dims must be a non-empty list drawn from 1, 2, 3")
        return v


class OutputConfig(BaseModel):
    """Output directory and simulate snapshots."""

    model_config = ConfigDict(extra="forbid")

    directory: Path = Field(
        default=Path("out"),
        description="Output directory (created before a run)"
    )
    snapshot_times: List[float] = Field(
        default_factory=list,
        description="Times of the simulate snapshots (empty: 0 and t_end)"
    )


class LoggingConfig(BaseModel):
    """Logging configuration."""

    model_config = ConfigDict(extra="forbid")

    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO",
        description="Logging level"
    )
    file: Optional[Path] = Field(
        default=None,
        description="Log file path (optional)"
    )
    format: Optional[str] = Field(
        default=None,
        description="Log message format (default adds the thread name when threads > 1)"
    )


class RunConfig(BaseModel):
    """Complete laboratory configuration."""

    model_config = ConfigDict(extra="forbid")

    model: ModelParams = Field(
        default_factory=ModelParams,
        description="Model constants"
    )
    grid: GridConfig = Field(
        default_factory=GridConfig,
        description="Grid settings"
    )
    initial: InitialConfig = Field(
        default_factory=InitialConfig,
        description="Initial condition"
    )
    solver: ImexConfig = Field(
        default_factory=lambda: ImexConfig(splitting="etd"),
        description="Time integration (etd splitting unless configured)"
    )
    experiment: ExperimentConfig = Field(
        default_factory=ExperimentConfig,
        description="Relaxation-limit experiments"
    )
    structure: StructureConfig = Field(
        default_factory=StructureConfig,
        description="Structure checks"
    )
    output: OutputConfig = Field(
        default_factory=OutputConfig,
        description="Output settings"
    )
    logging: LoggingConfig = Field(
        default_factory=LoggingConfig,
        description="Logging settings"
    )
    seed: int = Field(
        default=0,
        ge=0,
        description="Base seed of all random sampling"
    )
    threads: int = Field(
        default=1,
        ge=1,
        description="Worker threads (results do not depend on it)"
    )


# Environment variable mapping: (section, key[, converter]); section None is top level
ENV_MAPPING: Dict[str, Tuple[Any, ...]] = {
    "GHELAB_SEED": (None, "seed", int),
    "GHELAB_THREADS": (None, "threads", int),
    "GHELAB_OUT": ("output", "directory"),
    "GHELAB_EPSILON": ("model", "epsilon", float),
    "GHELAB_N_CELLS": ("grid", "n_cells", int),
    "LOG_LEVEL": ("logging", "level", str.upper),
}


def _get_env_value(env_var: str, mapping: tuple):
    """Get environment variable value with optional type conversion."""
    value = os.environ.get(env_var)
    if value is None or value == "":
        return None

    if len(mapping) > 2:
        converter = mapping[2]
        try:
            return converter(value)
        except (ValueError, TypeError):
            return value
    return value


def apply_env_overrides(raw_config: Dict[str, Any]) -> Dict[str, Any]:
    """Overlay environment variables on a raw config dictionary.

    Args:
        raw_config: Parsed YAML (not modified)

    Returns:
        New dictionary with the environment values applied
    """
    merged: Dict[str, Any] = {
        k: dict(v) if isinstance(v, dict) else v for k, v in raw_config.items()
    }
    for env_var, mapping in ENV_MAPPING.items():
        value = _get_env_value(env_var, mapping)
        if value is None:
            continue
        section, key = mapping[0], mapping[1]
        if section is None:
            merged[key] = value
        else:
            if not isinstance(merged.get(section), dict):
                merged[section] = {}
            merged[section][key] = value
    return merged


def load_config(config_path: str) -> RunConfig:
    """Load configuration from a YAML file.

    Args:
        config_path: Path to the YAML configuration file

    Returns:
        Validated RunConfig instance (environment overrides applied)

    Raises:
        FileNotFoundError: If config file doesn't exist
        ValueError: If config validation fails
    """
    path = Path(config_path)

    if not path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with open(path, "r") as f:
        raw_config = yaml.safe_load(f) or {}

    if not isinstance(raw_config, dict):
        raise ValueError(f"Configuration file {config_path} must contain a mapping")

    # Support environment variable substitution
    raw_config = _substitute_env_vars(raw_config)

    return RunConfig(**apply_env_overrides(raw_config))


def get_config(config_path: Optional[str] = None) -> RunConfig:
    """Get configuration from a config file or environment variables.

    Args:
        config_path: Optional path to YAML config file; must exist if given

    Returns:
        Validated RunConfig instance
    """
    if config_path:
        return load_config(config_path)
    return RunConfig(**apply_env_overrides({}))


def _substitute_env_vars(config):
    """Recursively substitute environment variables in config values.

    Environment variables are referenced as ${VAR_NAME} or $VAR_NAME.
    """
    if isinstance(config, dict):
        return {k: _substitute_env_vars(v) for k, v in config.items()}
    elif isinstance(config, list):
        return [_substitute_env_vars(item) for item in config]
    elif isinstance(config, str):
        # Handle ${VAR_NAME} format
        if config.startswith("${") and config.endswith("}"):
            var_name = config[2:-1]
            return os.environ.get(var_name, config)
        # Handle $VAR_NAME format
        elif config.startswith("$") and not config.startswith("${"):
            var_name = config[1:]
            return os.environ.get(var_name, config)
        return config
    else:
        return config


def config_to_dict(config: RunConfig) -> Dict[str, Any]:
    """Plain-type dictionary of a config, with model keys under their aliases."""
    data = config.model_dump(mode="json", exclude_none=True)
    data["model"] = config.model.model_dump(mode="json", by_alias=True)
    return data


def apply_overrides(config: RunConfig, overrides: Dict[str, Any]) -> RunConfig:
    """Re-validate a config with dotted-key overrides such as "output.directory".

    None values are skipped.

    Raises:
        ValidationError: If an override is invalid
    """
    data = config_to_dict(config)
    for dotted, value in overrides.items():
        if value is None:
            continue
        *sections, key = dotted.split(".")
        target = data
        for section in sections:
            target = target.setdefault(section, {})
        target[key] = value
    return RunConfig(**data)


def create_default_config() -> str:
    """Generate default configuration as YAML string."""
    return yaml.dump(
        config_to_dict(RunConfig()),
        default_flow_style=False,
        sort_keys=False,
    )


def print_env_help() -> str:
    """Generate help text for environment variables."""
    lines = [
        "Environment Variables:",
        "",
        "  Runs:",
        "    GHELAB_SEED          Base seed of random sampling (default: 0)",
        "    GHELAB_THREADS       Worker threads (default: 1)",
        "    GHELAB_OUT           Output directory (default: out)",
        "    GHELAB_EPSILON       Relaxation time of simulate (default: 0.1)",
        "    GHELAB_N_CELLS       Grid size of the relaxation runs (default: 2048)",
        "",
        "  Logging:",
        "    LOG_LEVEL            DEBUG, INFO, WARNING, ERROR (default: INFO)",
        "",
        "Command-line flags override these; they override the config file.",
    ]
    return "\n".join(lines)

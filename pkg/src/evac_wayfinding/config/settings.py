"""Configuration settings for the wayfinding simulator."""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

logger = logging.getLogger(__name__)

PHYSICAL_SOURCE_NAMES = ("sign", "crowd", "space")


class Tunables(BaseModel):
    """Model parameters shared by every scenario.

    Keys in scenario files use the short aliases (``theta``, ``W``, ``lambda``...).
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    # Macro-decision threshold
    theta: float = Field(0.5, gt=0.0, le=1.0)

    # Memory window in ticks; also the macro-decision cadence
    memory_window: int = Field(3, ge=1, alias="W")

    # Recency decay of the memory source
    decay: float = Field(0.5, gt=0.0, lt=1.0, alias="lambda")

    # Laplace smoothing of crowd counts
    crowd_smoothing: float = Field(1.0, gt=0.0, alias="beta")

    # Sign visibility used for a "Yes" level in synthetic mode
    v_table: float = Field(0.8, ge=0.0, le=1.0)

    # Weights of (max radial, area, perimeter, occlusivity) in the space source
    measure_weights: List[float] = Field(default_factory=lambda: [0.25, 0.25, 0.25, 0.25], alias="weights")

    # Isovist ray cap in meters
    d_cap: float = Field(50.0, gt=0.0)

    # Default sign visibility range in meters (signs may override)
    d_vis: float = Field(10.0, gt=0.0)

    # Support-degree clamp
    epsilon: float = Field(1e-5, gt=0.0)

    # Synthetic-mode per-entry noise amplitude
    noise: float = Field(0.05, ge=0.0, alias="eta")

    tick_limit: int = Field(500, ge=1)

    # Seconds per tick, for reporting only
    tick_s: float = Field(0.4, gt=0.0)

    @field_validator("measure_weights")
    @classmethod
    def _check_weights(cls, value: List[float]) -> List[float]:
        if len(value) != 4:
            raise ValueError("exactly four measure weights are required")
        if any(w < 0 for w in value):
            raise ValueError("measure weights must be non-negative")
        if not math.isclose(sum(value), 1.0, abs_tol=1e-9):
            raise ValueError("measure weights must sum to 1")
        return value


class AgentConfig(BaseModel):
    """Per-agent perception and decision parameters."""

    model_config = ConfigDict(frozen=True)

    fov: float = Field(2.0 * math.pi / 3.0, gt=0.0, le=2.0 * math.pi)
    memory_window: int = Field(3, ge=1)
    theta: float = Field(0.5, gt=0.0, le=1.0)
    step_len: float = Field(0.5, gt=0.0)
    decay: float = Field(0.5, gt=0.0, lt=1.0)
    stop_radius: float = Field(1.5, gt=0.0)
    max_deliberation_ticks: int = Field(60, ge=1)
    candidate_headings: int = Field(7, ge=2)

    # Source-model parameters the agent needs while perceiving
    crowd_smoothing: float = Field(1.0, gt=0.0)
    measure_weights: tuple = (0.25, 0.25, 0.25, 0.25)
    d_cap: float = Field(50.0, gt=0.0)
    epsilon: float = Field(1e-5, gt=0.0)

    # Physical sources replaced by the uniform distribution
    disabled_sources: Tuple[str, ...] = ()

    @field_validator("disabled_sources")
    @classmethod
    def _check_disabled(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        unknown = sorted(set(value) - set(PHYSICAL_SOURCE_NAMES))
        if unknown:
            raise ValueError(f"unknown sources {unknown}; expected a subset of {list(PHYSICAL_SOURCE_NAMES)}")
        return tuple(value)

    @classmethod
    def from_tunables(cls, tunables: Tunables, overrides: Optional[Dict[str, Any]] = None) -> "AgentConfig":
        """Build an agent configuration from scenario tunables plus per-population overrides.

        Args:
            tunables: Scenario tunables
            overrides: Field overrides from the scenario's ``agents.config`` block

        Returns:
            Validated AgentConfig
        """
        values: Dict[str, Any] = {
            "memory_window": tunables.memory_window,
            "theta": tunables.theta,
            "decay": tunables.decay,
            "crowd_smoothing": tunables.crowd_smoothing,
            "measure_weights": tuple(tunables.measure_weights),
            "d_cap": tunables.d_cap,
            "epsilon": tunables.epsilon,
        }
        values.update(overrides or {})
        if "fov_deg" in values:
            values["fov"] = math.radians(values.pop("fov_deg"))
        return cls(**values)


class LoggingConfig(BaseModel):
    """Configuration for logging."""

    level: str = "INFO"

    # Optional rotating log file
    file: Optional[str] = None

    colors: bool = True


class OutputConfig(BaseModel):
    """Configuration for result files."""

    directory: str = "results"


class AppConfig(BaseModel):
    """Main configuration for the application."""

    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    tunables: Tunables = Field(default_factory=Tunables)

    @model_validator(mode="after")
    def _normalise_level(self) -> "AppConfig":
        self.logging.level = self.logging.level.upper()
        return self


def load_config_from_yaml(config_path: str = "config.yaml") -> AppConfig:
    """Load application configuration from a YAML file.

    Args:
        config_path: Path to the YAML configuration file

    Returns:
        AppConfig with values from the YAML file, defaults elsewhere
    """
    config_file = Path(config_path)

    if not config_file.exists():
        return AppConfig()

    try:
        with open(config_file, 'r', encoding='utf-8') as f:
            yaml_data = yaml.safe_load(f) or {}
        return AppConfig.model_validate(yaml_data)
    except Exception as e:
        logger.warning(f"Failed to load config from {config_path}: {e}")
        logger.warning("Using default configuration")
        return AppConfig()

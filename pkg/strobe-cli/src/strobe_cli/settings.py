"""CLI configuration.

Loads settings from a YAML file (``--config``, ``./strobe.yaml`` or the
bundled template) with STRB_* environment variable overrides.
"""

import os
from importlib.resources import files
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, Field

from strobe_core.config import StrobeConfig
from strobe_core.errors import ConfigError

LOCAL_CONFIG = "strobe.yaml"


class CliConfig(BaseModel):
    """Configuration for the strobe command line."""

    # Sweep points run concurrently
    sweep_jobs: int = Field(default=1, ge=1)

    # Trajectory threads and grid per simulation; None keeps the core default
    simulation_jobs: int | None = Field(default=None, ge=1)
    simulation_steps_per_period: int | None = Field(default=None, ge=16)
    simulation_psn_mode: Literal["analytic", "mc"] | None = None
    simulation_record_runtime: bool | None = None

    # Bootstrap error bars
    bootstrap_resamples: int | None = Field(default=None, ge=100)

    # Debug logging to stderr
    debug: bool = False

    def strobe_settings(self, **overrides: Any) -> StrobeConfig:
        """Core settings with the CLI values layered over STRB_* defaults."""
        values = {
            "jobs": self.simulation_jobs,
            "steps_per_period": self.simulation_steps_per_period,
            "psn_mode": self.simulation_psn_mode,
            "record_runtime": self.simulation_record_runtime,
            "bootstrap_resamples": self.bootstrap_resamples,
            **overrides,
        }
        return StrobeConfig(**{k: v for k, v in values.items() if v is not None})


def _find_config_path() -> Path | None:
    """A strobe.yaml in the working directory, else the bundled template."""
    local = Path.cwd() / LOCAL_CONFIG
    if local.exists():
        return local
    bundled = files("strobe_cli") / "templates" / "config.yaml"
    if bundled.is_file():
        return Path(str(bundled))
    return None


def _load_yaml(path: Path) -> dict[str, Any]:
    """Load YAML config and flatten nested sections into CliConfig field names."""
    try:
        with open(path) as f:
            raw = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigError(f"cannot read CLI config {path}: {e}", key="config") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse CLI config {path}: {e}", key="config") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"CLI config {path} must be a mapping", key="config")

    flat: dict[str, Any] = {}
    for key, value in raw.items():
        if isinstance(value, dict):
            # simulation.jobs -> simulation_jobs
            for sub_key, sub_value in value.items():
                flat[f"{key}_{sub_key}"] = sub_value
        else:
            flat[key] = value
    return flat


def _truthy(value: str) -> bool:
    return value.lower() in ("1", "true", "yes")


def get_cli_config(path: Path | None = None) -> CliConfig:
    """Get the CLI configuration from YAML + env var overrides.

    Raises:
        ConfigError: If the file is unreadable or holds unknown keys.
    """
    config_path = path or _find_config_path()
    if path is not None and not path.exists():
        raise ConfigError(f"CLI config not found: {path}", key="config")
    data = _load_yaml(config_path) if config_path else {}

    # Env var overrides (highest priority)
    if jobs := os.environ.get("STRB_JOBS"):
        data["simulation_jobs"] = jobs
    if steps := os.environ.get("STRB_STEPS_PER_PERIOD"):
        data["simulation_steps_per_period"] = steps
    if psn_mode := os.environ.get("STRB_PSN_MODE"):
        data["simulation_psn_mode"] = psn_mode
    if record_runtime := os.environ.get("STRB_RECORD_RUNTIME"):
        data["simulation_record_runtime"] = _truthy(record_runtime)
    if resamples := os.environ.get("STRB_BOOTSTRAP_RESAMPLES"):
        data["bootstrap_resamples"] = resamples
    if debug := os.environ.get("STRB_DEBUG"):
        data["debug"] = _truthy(debug)

    unknown = sorted(set(data) - set(CliConfig.model_fields))
    if unknown:
        raise ConfigError(f"Unknown CLI config key {unknown[0]!r}", key=unknown[0])
    try:
        return CliConfig(**data)
    except ValueError as e:
        raise ConfigError(f"invalid CLI config: {e}", key="config") from e

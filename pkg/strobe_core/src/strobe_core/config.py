from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class StrobeConfig(BaseSettings):
    """Runtime configuration for strobe.

    Settings can be provided via environment variables with STRB_ prefix,
    e.g. STRB_DEFAULT_PARAMS=/path/to/params.json.
    """

    model_config = SettingsConfigDict(
        env_prefix="STRB_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Alternative physics parameter file (replaces the bundled Cs D2 set)
    default_params: Path | None = None

    # Pole guard band, in units of the natural linewidth
    pole_guard_linewidths: float = Field(default=10.0, ge=0.0)

    # Simulator grid and batching
    steps_per_period: int = Field(default=256, ge=16)
    block_size: int = Field(default=256, ge=1)
    jobs: int = Field(default=1, ge=1)

    # Bootstrap error bars
    bootstrap_resamples: int = Field(default=1000, ge=100)
    bootstrap_seed_offset: int = 1_000_003

    # How the harness gets PSN_A / PSN_B
    psn_mode: Literal["analytic", "mc"] = "analytic"

    # Write runtime_s (disable for byte-identical repeated sweeps)
    record_runtime: bool = True

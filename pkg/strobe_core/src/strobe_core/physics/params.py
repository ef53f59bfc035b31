"""Physics parameter documents.

A parameter set is a flat JSON object with cyclic ``_hz`` frequencies. The
converters below return the rad/s models used everywhere else.
"""

import json
import logging
import math
from importlib.resources import files
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from strobe_core.config import StrobeConfig
from strobe_core.errors import ConfigError
from strobe_core.physics.models import (
    AtomicTransition,
    CavityConfig,
    EnsembleConfig,
    ProbeConfig,
)

logger = logging.getLogger(__name__)

DEFAULT_PARAMETER_SET = "cs_d2"

_TWO_PI = 2.0 * math.pi


class ParameterSet(BaseModel):
    """Flat physics parameter document with the external key names."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    # Excited-state structure (cyclic Hz, converted with 2*pi)
    gamma_hz: float = Field(gt=0.0)
    lambda_m: float = Field(gt=0.0)
    delta35_hz: float = Field(gt=0.0)
    delta45_hz: float = Field(gt=0.0)
    F: int = Field(default=4, ge=1)

    # Ensemble; gamma_dark_hz is a decay rate in 1/s and is not scaled
    n_at: float = Field(gt=0.0)
    orientation: float = Field(default=1.0, ge=0.0, le=1.0)
    gamma_dark_hz: float = Field(default=0.0, ge=0.0)
    t1_s: float = Field(default=math.inf, gt=0.0)

    # Probe
    detuning_hz: float
    area_m2: float = Field(gt=0.0)
    flux_bar: float = Field(ge=0.0)
    duration_s: float = Field(gt=0.0)
    polarization: Literal["x", "y"] = "x"

    # Cavity
    t_in: float = Field(default=0.0, ge=0.0, lt=1.0)
    t_out: float = Field(default=0.2, ge=0.0, lt=1.0)
    loss: float = Field(default=0.0, ge=0.0, lt=1.0)
    alpha: float = Field(default=0.0, ge=0.0, lt=1.0)

    def transition(self) -> AtomicTransition:
        return AtomicTransition(
            gamma=_TWO_PI * self.gamma_hz,
            wavelength=self.lambda_m,
            delta_35=_TWO_PI * self.delta35_hz,
            delta_45=_TWO_PI * self.delta45_hz,
            F=self.F,
        )

    def ensemble(self) -> EnsembleConfig:
        return EnsembleConfig(
            n_at=self.n_at,
            orientation=self.orientation,
            F=self.F,
            gamma_dark=self.gamma_dark_hz,
            t1=self.t1_s,
        )

    def probe(
        self, duration: float | None = None, flux_bar: float | None = None
    ) -> ProbeConfig:
        """Probe model, optionally for another pulse length or flux."""
        return ProbeConfig(
            detuning=_TWO_PI * self.detuning_hz,
            area=self.area_m2,
            flux_bar=self.flux_bar if flux_bar is None else flux_bar,
            duration=self.duration_s if duration is None else duration,
            polarization_axis=self.polarization,
        )

    def cavity(self) -> CavityConfig:
        return CavityConfig(
            t_in=self.t_in, t_out=self.t_out, loss=self.loss, alpha=self.alpha
        )


def first_error_key(exc: ValidationError) -> str | None:
    errors = exc.errors()
    if not errors:
        return None
    return ".".join(str(part) for part in errors[0]["loc"]) or None


def parameter_set_from_mapping(data: dict[str, Any]) -> ParameterSet:
    """Validate a mapping into a ParameterSet.

    Raises:
        ConfigError: On unknown keys or invalid values, naming the first
            offending key.
    """
    try:
        return ParameterSet.model_validate(data)
    except ValidationError as exc:
        key = first_error_key(exc)
        raise ConfigError(f"invalid parameter set: {exc}", key=key) from exc


def bundled_parameter_sets() -> list[str]:
    """Names of the parameter sets shipped with the package."""
    root = files("strobe_core") / "data" / "params"
    return sorted(
        entry.name.removesuffix(".json")
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def _read_bundled(name: str) -> dict[str, Any]:
    available = bundled_parameter_sets()
    if name not in available:
        raise ConfigError(
            f"Unknown parameter set {name!r}. Available: {available}", key="base"
        )
    resource = files("strobe_core") / "data" / "params" / f"{name}.json"
    return json.loads(resource.read_text(encoding="utf-8"))


def load_parameter_set(source: str | Path | None = None) -> ParameterSet:
    """Load a parameter set from a file path or a bundled name.

    Args:
        source: Path to a JSON document, or the name of a bundled set.
            When None, ``STRB_DEFAULT_PARAMS`` is honoured before falling
            back to the bundled Cs D2 set.

    Raises:
        ConfigError: If the document is missing, not JSON or invalid.
    """
    if source is None:
        source = StrobeConfig().default_params or DEFAULT_PARAMETER_SET

    path = Path(source)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise ConfigError(f"parameter file not found: {path}", key="base")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"parameter file {path} is not JSON: {exc}", key="base"
            ) from exc
    else:
        data = _read_bundled(str(source))

    if not isinstance(data, dict):
        raise ConfigError("parameter set must be a JSON object", key="base")
    logger.debug("load_parameter_set source=%s", source)
    return parameter_set_from_mapping(data)

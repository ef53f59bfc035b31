"""Scenario files: physics parameters, pulse schedule, sweep axis and protocol.

Scenario files are JSON or YAML. ``base`` names the physics parameter set: a
path relative to the scenario file, a bundled name, or an inline mapping.
"""

import json
import logging
from pathlib import Path
from typing import Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from strobe_core.errors import ConfigError
from strobe_core.physics.params import (
    DEFAULT_PARAMETER_SET,
    ParameterSet,
    first_error_key,
    load_parameter_set,
    parameter_set_from_mapping,
)
from strobe_core.sim.models import DetectionConfig, ModeFunction

logger = logging.getLogger(__name__)

ProtocolName = Literal[
    "single_pulse_noise",
    "back_action_sweep",
    "two_pulse_squeezing",
    "thermal_calibration",
]


class ModeSpec(BaseModel):
    """Lock-in mode of one pulse.

    A missing rate means the ensemble's dark decay rate.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["flat", "exp_rising", "exp_falling"] = "flat"
    rate: float | None = Field(default=None, ge=0.0)

    def resolve(self, default_rate: float) -> ModeFunction:
        rate = default_rate if self.rate is None else self.rate
        return ModeFunction(kind=self.kind, rate=rate if self.kind != "flat" else 0.0)


class ScheduleSpec(BaseModel):
    """Pulse sequence in experiment units.

    Pulse A carries the parameter set's flux unless ``n_ph_a`` or
    ``kappa_tilde_sq_a`` is given; pulse B follows pulse A unless ``n_ph_b``
    or ``flux_bar_b`` is given.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    omega_hz: float = Field(default=380e3, gt=0.0)
    steps_per_period: int | None = Field(default=None, ge=8)
    duty: float = Field(default=0.15, gt=0.0, le=1.0)
    n_cycles_a: int = Field(default=20, ge=1)
    n_cycles_b: int = Field(default=0, ge=0)
    gap_cycles: int = Field(default=0, ge=0)
    n_ph_a: float | None = Field(default=None, gt=0.0)
    n_ph_b: float | None = Field(default=None, gt=0.0)
    kappa_tilde_sq_a: float | None = Field(default=None, gt=0.0)
    flux_bar_b: float | None = Field(default=None, ge=0.0)
    tensor_enabled: bool = False
    mode_a: ModeSpec = ModeSpec()
    mode_b: ModeSpec = ModeSpec()
    zeta: float = Field(default=0.0, ge=0.0)
    d_eff: float = Field(default=1.0, gt=0.0)
    depump_rate: float = Field(default=0.0, ge=0.0)
    detection: DetectionConfig = DetectionConfig()


class InitSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["ground", "thermal_occupancy", "unpolarized_thermal"] = "ground"
    n_bar: float = Field(default=0.0, ge=0.0)


class LogRange(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    start: float = Field(gt=0.0)
    stop: float = Field(gt=0.0)
    num: int = Field(ge=1)


class SweepSpec(BaseModel):
    """Sweep axis: a variable with explicit values or a log-spaced range."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    variable: str
    values: list[float] | None = None
    log_range: LogRange | None = None

    @model_validator(mode="after")
    def _one_source(self) -> "SweepSpec":
        if (self.values is None) == (self.log_range is None):
            raise ValueError("give exactly one of values and log_range")
        if self.values is not None and not self.values:
            raise ValueError("values must not be empty")
        return self

    def points(self) -> list[float]:
        if self.values is not None:
            return list(self.values)
        r = self.log_range
        return np.geomspace(r.start, r.stop, r.num).tolist()


# Keys that are not parameter-set or schedule fields.
_INIT_KEYS = {"n_bar": "n_bar", "init_kind": "kind"}
_STRUCTURED_SCHEDULE_KEYS = {"mode_a", "mode_b", "detection"}


def override_keys() -> list[str]:
    """Names accepted as sweep variables and series overrides."""
    schedule_keys = set(ScheduleSpec.model_fields) - _STRUCTURED_SCHEDULE_KEYS
    keys = set(ParameterSet.model_fields) | schedule_keys | set(_INIT_KEYS)
    return sorted(keys | {"cavity"})


class ScenarioConfig(BaseModel):
    """One reproducible experiment: protocol, sweep and everything it needs.

    Attributes:
        name: Output file stem.
        base: Where ``params`` came from (path, bundled name or mapping).
        params: Resolved physics parameter set.
        sweep: Sweep axis.
        protocol: Protocol run at every sweep point.
        n_traj: Trajectories per point.
        base_seed: Root seed of the sweep.
        outputs: Output directory.
        series: Optional override sets, each written to its own file;
            every entry needs a ``name``.
        ground_ref_mode: Coherent-state reference from closed form or from
            dedicated ground-state runs.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")
    base: str | dict[str, Any] = DEFAULT_PARAMETER_SET
    params: ParameterSet
    sweep: SweepSpec
    protocol: ProtocolName
    n_traj: int = Field(default=10_000, ge=100)
    base_seed: int = Field(default=0, ge=0)
    outputs: Path = Path("outputs")
    schedule: ScheduleSpec = ScheduleSpec()
    init: InitSpec = InitSpec()
    cavity: bool = False
    series: list[dict[str, Any]] | None = None
    ground_ref_mode: Literal["analytic", "mc"] = "analytic"
    format: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def _check_keys(self) -> "ScenarioConfig":
        known = override_keys()
        if self.sweep.variable not in known:
            raise ValueError(
                f"Unknown sweep variable {self.sweep.variable!r}. Available: {known}"
            )
        names = set()
        for entry in self.series or []:
            name = entry.get("name")
            if not isinstance(name, str) or not name:
                raise ValueError("every series entry needs a name")
            if name in names:
                raise ValueError(f"duplicate series name {name!r}")
            names.add(name)
            unknown = sorted(set(entry) - {"name"} - set(known))
            if unknown:
                raise ValueError(
                    f"Unknown series key {unknown[0]!r}. Available: {known}"
                )
        return self


def apply_overrides(
    config: ScenarioConfig, overrides: dict[str, Any]
) -> ScenarioConfig:
    """Return a copy of the scenario with flat overrides applied.

    Raises:
        ConfigError: For unknown keys or values that fail validation.
    """
    params = config.params.model_dump()
    schedule = config.schedule.model_dump()
    init = config.init.model_dump()
    top: dict[str, Any] = {}
    for key, value in overrides.items():
        if key in ParameterSet.model_fields:
            params[key] = value
        elif key in ScheduleSpec.model_fields and key not in _STRUCTURED_SCHEDULE_KEYS:
            schedule[key] = value
        elif key in _INIT_KEYS:
            init[_INIT_KEYS[key]] = value
        elif key == "cavity":
            top[key] = value
        else:
            raise ConfigError(
                f"Unknown override {key!r}. Available: {override_keys()}", key=key
            )
    data = config.model_dump()
    data.update(top, params=params, schedule=schedule, init=init)
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid override: {e}", key=first_error_key(e)) from e


def _read_document(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}", key="config")
    text = path.read_text()
    try:
        if path.suffix == ".json":
            raw = json.loads(text)
        elif path.suffix in (".yaml", ".yml"):
            raw = yaml.safe_load(text)
        else:
            raise ConfigError(
                f"scenario file must be .json, .yaml or .yml: {path}", key="config"
            )
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot parse {path}: {e}", key="config") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"scenario {path} must be a mapping", key="config")
    return raw


def _resolve_base(base: Any, scenario_dir: Path) -> ParameterSet:
    if base is None:
        return load_parameter_set()
    if isinstance(base, dict):
        return parameter_set_from_mapping(base)
    if not isinstance(base, str):
        raise ConfigError(
            "base must be a path, a bundled name or a mapping", key="base"
        )
    candidate = scenario_dir / base
    if candidate.exists() or base.endswith(".json"):
        return load_parameter_set(candidate)
    return load_parameter_set(base)


def load_scenario(path: Path) -> ScenarioConfig:
    """Load and validate a scenario file.

    Raises:
        ConfigError: With the offending key when the file is missing,
            unparsable or invalid.
    """
    path = Path(path)
    raw = _read_document(path)
    params = _resolve_base(raw.get("base"), path.parent)
    data = {**raw, "params": params}
    if raw.get("base") is None:
        data["base"] = DEFAULT_PARAMETER_SET
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        key = first_error_key(e)
        raise ConfigError(f"invalid scenario {path}: {e}", key=key) from e
    logger.debug("load_scenario path=%s protocol=%s", path, config.protocol)
    return config

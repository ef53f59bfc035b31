"""Scenario files, measurement protocols and parameter sweeps."""

from strobe_core.harness.scenario import (
    InitSpec,
    ModeSpec,
    ScenarioConfig,
    ScheduleSpec,
    SweepSpec,
    apply_overrides,
    load_scenario,
    override_keys,
)
from strobe_core.harness.protocols import (
    PROTOCOL_REGISTRY,
    PointSetup,
    ProtocolResult,
    cavity_terms,
    get_protocol,
    prepare_point,
    run_protocol,
)
from strobe_core.harness.runner import (
    CSV_COLUMNS,
    RowWriter,
    SweepRow,
    fit_decoherence,
    output_path,
    read_rows,
    run_point,
    run_scenario,
)

__all__ = [
    "ScenarioConfig",
    "ScheduleSpec",
    "ModeSpec",
    "InitSpec",
    "SweepSpec",
    "load_scenario",
    "apply_overrides",
    "override_keys",
    "PointSetup",
    "ProtocolResult",
    "PROTOCOL_REGISTRY",
    "get_protocol",
    "prepare_point",
    "run_protocol",
    "cavity_terms",
    "SweepRow",
    "CSV_COLUMNS",
    "RowWriter",
    "output_path",
    "read_rows",
    "run_point",
    "run_scenario",
    "fit_decoherence",
]

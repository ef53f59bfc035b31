"""Simulator and closed-form analytics for stroboscopic QND measurement."""

from strobe_core.config import StrobeConfig
from strobe_core.errors import (
    ConfigError,
    DegenerateError,
    DomainError,
    GridError,
    NegativeNoiseWarning,
    NumericalError,
    PoleError,
    RangeError,
    StrobeError,
)
from strobe_core.physics import (
    CouplingSet,
    ParameterSet,
    coupling_set,
    load_parameter_set,
)
from strobe_core.analytics import (
    StrobeProfile,
    conditional_squeezing,
    predict_variances,
    strobe_profile,
    total_squeezing,
)
from strobe_core.sim import (
    ModeFunction,
    OscillatorState,
    PulseSchedule,
    TwoPulseRun,
    init_state,
    read_dump,
    run_two_pulse,
    write_dump,
)
from strobe_core.estimation import (
    RecordEnsemble,
    SqueezingReport,
    bootstrap_ci,
    squeezing_report,
)
from strobe_core.harness import (
    ScenarioConfig,
    SweepRow,
    load_scenario,
    run_scenario,
)

__all__ = [
    # Config
    "StrobeConfig",
    # Errors
    "StrobeError",
    "PoleError",
    "DomainError",
    "RangeError",
    "GridError",
    "DegenerateError",
    "ConfigError",
    "NumericalError",
    "NegativeNoiseWarning",
    # Physics
    "ParameterSet",
    "CouplingSet",
    "load_parameter_set",
    "coupling_set",
    # Analytics
    "StrobeProfile",
    "strobe_profile",
    "predict_variances",
    "conditional_squeezing",
    "total_squeezing",
    # Simulation
    "PulseSchedule",
    "ModeFunction",
    "OscillatorState",
    "TwoPulseRun",
    "init_state",
    "run_two_pulse",
    "write_dump",
    "read_dump",
    # Estimation
    "RecordEnsemble",
    "SqueezingReport",
    "squeezing_report",
    "bootstrap_ci",
    # Harness
    "ScenarioConfig",
    "SweepRow",
    "load_scenario",
    "run_scenario",
]

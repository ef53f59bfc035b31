"""Monte-Carlo Gaussian trajectories of the stroboscopically probed oscillator."""

from strobe_core.sim.models import (
    MODE_KINDS,
    DetectionConfig,
    ModeFunction,
    OscillatorState,
    PulseSchedule,
    TrajectoryRecord,
    TwoPulseRun,
    get_mode,
)
from strobe_core.sim.rng import derived_seed, stream_generator
from strobe_core.sim.states import INIT_KINDS, init_state, spin_temperature_populations
from strobe_core.sim.engine import (
    flux_for_kappa_tilde_sq,
    kappa_tilde_sq_for,
    run_two_pulse,
    shot_noise_reference,
    shot_noise_variance,
    step_period,
)
from strobe_core.sim.dump import (
    DumpMetadata,
    cycle_shot_noise_variance,
    lockin_from_cycles,
    read_dump,
    write_dump,
)

__all__ = [
    "DetectionConfig",
    "PulseSchedule",
    "ModeFunction",
    "MODE_KINDS",
    "get_mode",
    "OscillatorState",
    "TrajectoryRecord",
    "TwoPulseRun",
    "derived_seed",
    "stream_generator",
    "init_state",
    "INIT_KINDS",
    "spin_temperature_populations",
    "step_period",
    "run_two_pulse",
    "shot_noise_reference",
    "shot_noise_variance",
    "kappa_tilde_sq_for",
    "flux_for_kappa_tilde_sq",
    "DumpMetadata",
    "write_dump",
    "read_dump",
    "lockin_from_cycles",
    "cycle_shot_noise_variance",
]

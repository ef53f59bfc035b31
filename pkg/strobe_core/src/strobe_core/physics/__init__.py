"""Atom-light-cavity coupling constants for the probed Cs ensemble."""

from strobe_core.physics.models import (
    AtomicTransition,
    CavityConfig,
    CouplingSet,
    EnsembleConfig,
    ProbeConfig,
)
from strobe_core.physics.cavity import (
    enhanced_absorption,
    finesse,
    output_power_factor,
    resonant_transmission,
)
from strobe_core.physics.couplings import cavity_enhance, coupling_set, polarizabilities
from strobe_core.physics.params import (
    DEFAULT_PARAMETER_SET,
    ParameterSet,
    bundled_parameter_sets,
    load_parameter_set,
    parameter_set_from_mapping,
)

__all__ = [
    "AtomicTransition",
    "EnsembleConfig",
    "ProbeConfig",
    "CouplingSet",
    "CavityConfig",
    "polarizabilities",
    "coupling_set",
    "cavity_enhance",
    "finesse",
    "resonant_transmission",
    "enhanced_absorption",
    "output_power_factor",
    "ParameterSet",
    "DEFAULT_PARAMETER_SET",
    "bundled_parameter_sets",
    "load_parameter_set",
    "parameter_set_from_mapping",
]

"""Impedance-matching helpers for the probe cavity."""

import math

from strobe_core.errors import DomainError
from strobe_core.physics.models import CavityConfig


def finesse(t_in: float, t_out: float, loss: float) -> float:
    """High-finesse approximation 2*pi / (T_in + T_out + L)."""
    total = t_in + t_out + loss
    if total <= 0.0:
        raise DomainError("finesse needs positive total loss")
    return 2.0 * math.pi / total


def resonant_transmission(cavity: CavityConfig) -> float:
    """Power transmission on resonance, including the atomic absorption.

    Equals 1 for a lossless cavity with matched couplers.
    """
    total = cavity.t_in + cavity.t_out + cavity.loss + 2.0 * cavity.alpha
    return 4.0 * cavity.t_in * cavity.t_out / total**2


def enhanced_absorption(cavity: CavityConfig) -> float:
    """Absorption seen by the intracavity atoms, (2F/pi) alpha."""
    return 2.0 * cavity.finesse / math.pi * cavity.alpha


def output_power_factor(t_out: float) -> float:
    """Intracavity decoherence per detected signal, 2/T_2 - 1."""
    if t_out <= 0.0:
        raise DomainError("output coupler transmission must be positive")
    return 2.0 / t_out - 1.0

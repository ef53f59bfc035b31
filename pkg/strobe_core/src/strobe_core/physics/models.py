"""Physical input models for the atom-light-cavity system.

All angular frequencies are in rad/s and decay rates in 1/s. Units follow
hbar = c = 1, so beta carries the only residual dimension.
"""

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class AtomicTransition(BaseModel):
    """Excited-state structure of the probed line.

    Attributes:
        gamma: Natural linewidth (rad/s).
        wavelength: Transition wavelength (m).
        delta_35: Splitting between the F'=5 and F'=3 excited levels (rad/s).
        delta_45: Splitting between the F'=5 and F'=4 excited levels (rad/s).
        F: Total ground-state spin of the probed manifold.
    """

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(gt=0.0)
    wavelength: float = Field(gt=0.0)
    delta_35: float = Field(gt=0.0)
    delta_45: float = Field(gt=0.0)
    F: int = Field(default=4, ge=1)

    @model_validator(mode="after")
    def _check_ordering(self) -> "AtomicTransition":
        if self.delta_35 <= self.delta_45:
            raise ValueError("delta_35 must exceed delta_45")
        return self


class EnsembleConfig(BaseModel):
    """Atomic ensemble: size, orientation and lifetimes.

    Attributes:
        n_at: Number of atoms.
        orientation: Spin orientation p in [0, 1].
        F: Ground-state spin.
        gamma_dark: Transverse decay rate without light (1/s).
        t1: Longitudinal lifetime (s); may be infinite.
    """

    model_config = ConfigDict(frozen=True)

    n_at: float = Field(gt=0.0)
    orientation: float = Field(default=1.0, ge=0.0, le=1.0)
    F: int = Field(default=4, ge=1)
    gamma_dark: float = Field(default=0.0, ge=0.0)
    t1: float = Field(default=math.inf, gt=0.0)

    @computed_field
    @property
    def jx(self) -> float:
        """Macroscopic spin J_x = p * N_at * F."""
        return self.orientation * self.n_at * self.F


class ProbeConfig(BaseModel):
    """Probe light pulse.

    Attributes:
        detuning: Detuning from the F'=5 line (rad/s, negative = blue).
        area: Interaction cross-section (m^2).
        flux_bar: Period-averaged photon flux (photons/s).
        duration: Pulse length (s).
        polarization_axis: Linear polarization of the input light.
    """

    model_config = ConfigDict(frozen=True)

    detuning: float
    area: float = Field(gt=0.0)
    flux_bar: float = Field(ge=0.0)
    duration: float = Field(gt=0.0)
    polarization_axis: Literal["x", "y"] = "x"

    @model_validator(mode="after")
    def _check_detuning(self) -> "ProbeConfig":
        if self.detuning == 0.0:
            raise ValueError("detuning must be non-zero")
        return self

    @property
    def n_ph(self) -> float:
        """Photons in the pulse, N_ph = flux_bar * duration."""
        return self.flux_bar * self.duration

    @property
    def sx_sign(self) -> float:
        """Sign of S_x: +1 for x-polarized input, -1 for y."""
        return 1.0 if self.polarization_axis == "x" else -1.0


class CouplingSet(BaseModel):
    """Interaction parameters derived from the physical inputs.

    kappa and kappa_tilde are strengths (non-negative); beta keeps its sign.
    ``enhancement`` is 1 without a cavity and 2F/pi after cavity_enhance;
    the simulator integrates ``beta_eff``.
    """

    model_config = ConfigDict(frozen=True)

    a0: float
    a1: float
    a2: float
    beta: float
    kappa: float = Field(ge=0.0)
    kappa_tilde: float = Field(ge=0.0)
    w: float
    gamma_sw: float
    enhancement: float = Field(default=1.0, ge=0.0)

    @property
    def beta_eff(self) -> float:
        return self.beta * self.enhancement

    def __str__(self) -> str:
        return (
            f"CouplingSet(a=({self.a0:.4g}, {self.a1:.4g}, {self.a2:.4g}), "
            f"beta={self.beta:.4g}, kappa={self.kappa:.4g}, "
            f"kappa_tilde={self.kappa_tilde:.4g}, w={self.w:.4g}, "
            f"gamma_sw={self.gamma_sw:.4g}/s, x{self.enhancement:.3g})"
        )


class CavityConfig(BaseModel):
    """Standing-wave cavity around the cell.

    Attributes:
        t_in: Input coupler power transmission.
        t_out: Output coupler power transmission T_2.
        loss: Round-trip intracavity power loss.
        alpha: Single-pass atomic absorption.
    """

    model_config = ConfigDict(frozen=True)

    t_in: float = Field(default=0.0, ge=0.0, lt=1.0)
    t_out: float = Field(ge=0.0, lt=1.0)
    loss: float = Field(default=0.0, ge=0.0, lt=1.0)
    alpha: float = Field(default=0.0, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_losses(self) -> "CavityConfig":
        if self.t_in + self.t_out + self.loss <= 0.0:
            raise ValueError("cavity needs some transmission or loss")
        return self

    @computed_field
    @property
    def finesse(self) -> float:
        """High-finesse approximation 2*pi / (T_in + T_out + L)."""
        return 2.0 * math.pi / (self.t_in + self.t_out + self.loss)

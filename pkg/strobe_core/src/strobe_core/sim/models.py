"""Simulator inputs and outputs."""

import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from strobe_core.errors import GridError

# Relative slack when checking that a duration is a whole number of periods.
_PERIOD_TOLERANCE = 1e-6

# Slack on the uncertainty bound det(cov) >= 1/4.
HEISENBERG_TOLERANCE = 1e-9


class DetectionConfig(BaseModel):
    """Polarimeter imperfections.

    Attributes:
        efficiency: Fraction of the output light detected.
        electronic_noise: Detector noise as a fraction of shot noise.
    """

    model_config = ConfigDict(frozen=True)

    efficiency: float = Field(default=1.0, gt=0.0, le=1.0)
    electronic_noise: float = Field(default=0.0, ge=0.0)


class PulseSchedule(BaseModel):
    """Time grid and light pulses for the two-pulse protocol.

    Pulse lengths must be whole Larmor periods. The strobe window is snapped
    to the grid, so the duty cycle that is actually simulated is
    ``effective_duty``; flux during a window is flux_bar / effective_duty.
    """

    model_config = ConfigDict(frozen=True)

    omega: float = Field(gt=0.0)
    steps_per_period: int = Field(default=256, ge=8)
    duty: float = Field(gt=0.0, le=1.0)
    tau_a: float = Field(gt=0.0)
    tau_b: float = Field(default=0.0, ge=0.0)
    flux_bar: float = Field(ge=0.0)
    flux_bar_b: float | None = Field(default=None, ge=0.0)
    gap: float = Field(default=0.0, ge=0.0)
    tensor_enabled: bool = False

    # Probe-induced J_x loss rate while illuminated (1/s)
    depump_rate: float = Field(default=0.0, ge=0.0)

    # Probe-induced decoherence noise zeta * kappa_tilde^2 / optical_depth
    zeta: float = Field(default=0.0, ge=0.0)
    optical_depth: float = Field(default=1.0, gt=0.0)

    detection: DetectionConfig = DetectionConfig()

    @classmethod
    def from_cycles(
        cls,
        omega: float,
        duty: float,
        n_cycles_a: int,
        flux_bar: float,
        n_cycles_b: int = 0,
        gap_cycles: int = 0,
        **kwargs,
    ) -> "PulseSchedule":
        """Build a schedule from whole cycle counts."""
        period = 2.0 * math.pi / omega
        return cls(
            omega=omega,
            duty=duty,
            tau_a=n_cycles_a * period,
            tau_b=n_cycles_b * period,
            gap=gap_cycles * period,
            flux_bar=flux_bar,
            **kwargs,
        )

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def dt(self) -> float:
        return self.period / self.steps_per_period

    @property
    def window_half_steps(self) -> int:
        """Grid steps on each side of a strobe centre."""
        return round(self.duty * self.steps_per_period / 4.0)

    @property
    def effective_duty(self) -> float:
        return 4.0 * self.window_half_steps / self.steps_per_period

    @property
    def n_cycles_a(self) -> int:
        return round(self.tau_a / self.period)

    @property
    def n_cycles_b(self) -> int:
        return round(self.tau_b / self.period)

    @property
    def gap_cycles(self) -> int:
        return round(self.gap / self.period)

    @property
    def flux_b(self) -> float:
        return self.flux_bar if self.flux_bar_b is None else self.flux_bar_b

    def _whole_periods(self, name: str, duration: float) -> None:
        cycles = duration / self.period
        if abs(cycles - round(cycles)) > _PERIOD_TOLERANCE * max(1.0, cycles):
            raise GridError(
                f"{name} = {duration!r} s is not a whole number of periods "
                f"({cycles:.6f} cycles)"
            )

    def check_grid(self) -> None:
        """Validate the grid against the schedule.

        Raises:
            GridError: If steps_per_period is not divisible by 4, a strobe
                window spans fewer than 4 steps, or a pulse is not a whole
                number of periods.
        """
        if self.steps_per_period % 4:
            raise GridError(
                f"steps_per_period must be divisible by 4, got {self.steps_per_period}"
            )
        window = 2 * self.window_half_steps
        if window < 4:
            raise GridError(
                f"strobe window spans {window} steps at duty {self.duty:g}; "
                f"increase steps_per_period above {self.steps_per_period}"
            )
        self._whole_periods("tau_a", self.tau_a)
        self._whole_periods("tau_b", self.tau_b)
        if self.n_cycles_a < 1:
            raise GridError("tau_a must span at least one period")


ModeKind = Literal["flat", "exp_rising", "exp_falling"]


class ModeFunction(BaseModel):
    """Temporal weight applied to the demodulated record of a pulse.

    ``exp_rising`` weights late times (the state at the end of a pulse),
    ``exp_falling`` early times (the state at the start).
    """

    model_config = ConfigDict(frozen=True)

    kind: ModeKind = "flat"
    rate: float = Field(default=0.0, ge=0.0)

    def normalization(self, tau: float) -> float:
        """Prefactor giving the mode a squared integral of 2 over the pulse."""
        x = 2.0 * self.rate * tau
        if self.kind == "flat" or x == 0.0:
            return math.sqrt(2.0 / tau)
        if self.kind == "exp_rising":
            return math.sqrt(4.0 * self.rate / -math.expm1(-x)) * math.exp(-0.5 * x)
        return math.sqrt(4.0 * self.rate / -math.expm1(-x))

    def weights(self, t_local: np.ndarray, tau: float) -> np.ndarray:
        """Normalized weights at times measured from the pulse start."""
        t_local = np.asarray(t_local, dtype=float)
        if self.kind == "flat" or self.rate == 0.0:
            shape = np.ones_like(t_local)
        elif self.kind == "exp_rising":
            # normalization * exp(rate t), rearranged to stay finite
            x = 2.0 * self.rate * tau
            scaled = math.sqrt(4.0 * self.rate / -math.expm1(-x))
            return scaled * np.exp(self.rate * (t_local - tau))
        else:
            shape = np.exp(-self.rate * t_local)
        return self.normalization(tau) * shape


MODE_KINDS: tuple[str, ...] = ("flat", "exp_rising", "exp_falling")


def get_mode(kind: str, rate: float = 0.0) -> ModeFunction:
    """Resolve a mode function by name."""
    if kind not in MODE_KINDS:
        raise ValueError(f"Unknown mode {kind!r}. Available: {list(MODE_KINDS)}")
    return ModeFunction(kind=kind, rate=rate)


class OscillatorState(BaseModel):
    """Gaussian state of the spin oscillator.

    ``mean`` holds (X, P) with X = J_z / sqrt(jx_ref) and P = J_y / sqrt(jx_ref);
    a coherent spin state has cov = diag(1/2, 1/2). In a trajectory the mean
    is the sampled value and ``cov`` the ensemble covariance.

    Attributes:
        jx: Macroscopic spin J_x driving back-action (0 when unpolarized).
        jx_ref: Spin that normalizes X and P.
        bath_var: Variance restored by dark relaxation.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mean: np.ndarray
    cov: np.ndarray
    jx: float = Field(ge=0.0)
    time: float = 0.0
    jx_ref: float = Field(gt=0.0)
    bath_var: float = Field(default=0.5, gt=0.0)

    @field_validator("mean", mode="before")
    @classmethod
    def _as_vector(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float).reshape(-1)
        if array.shape != (2,):
            raise ValueError("mean must have two components")
        return array

    @field_validator("cov", mode="before")
    @classmethod
    def _as_covariance(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float)
        if array.shape != (2, 2):
            raise ValueError("cov must be 2x2")
        if not np.allclose(array, array.T, rtol=1e-12, atol=1e-15):
            raise ValueError("cov must be symmetric")
        if np.linalg.eigvalsh(array).min() < -1e-12:
            raise ValueError("cov must be positive semidefinite")
        det = float(np.linalg.det(array))
        if det < 0.25 - HEISENBERG_TOLERANCE:
            raise ValueError(
                f"cov violates the uncertainty bound: det={det:.6g} < 1/4"
            )
        return array

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.cov))

    @property
    def n_bar(self) -> float:
        """Occupancy Var(X) + Var(P) - 1."""
        return float(self.cov[0, 0] + self.cov[1, 1] - 1.0)

    def __str__(self) -> str:
        return (
            f"OscillatorState(t={self.time:.6g}s, var_x={self.cov[0, 0]:.6g}, "
            f"var_p={self.cov[1, 1]:.6g}, jx={self.jx:.4g})"
        )


class TrajectoryRecord(BaseModel):
    """Lock-in outputs of one trajectory.

    ``per_cycle`` holds (Y_cos, Y_sin) for every period of pulse A then B.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    q_a: float
    q_b: float
    per_cycle: np.ndarray | None = None
    seed: tuple[int, int]


class TwoPulseRun(BaseModel):
    """Records of a two-pulse run plus the simulator's exact bookkeeping.

    Attributes:
        records: One record per trajectory, ordered by index.
        f_d: J_x(tau_A) / J_x(0).
        min_cov_det: Smallest det(cov) of the ensemble covariance on the grid.
        state_after_a: Ensemble state at the end of pulse A.
        x_after_a: Sampled X of every trajectory at the end of pulse A.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    schedule: PulseSchedule
    mode_a: ModeFunction
    mode_b: ModeFunction
    records: list[TrajectoryRecord]
    f_d: float = Field(gt=0.0, le=1.0)
    min_cov_det: float
    state_after_a: OscillatorState
    x_after_a: np.ndarray

    @property
    def qa(self) -> np.ndarray:
        return np.array([r.q_a for r in self.records])

    @property
    def qb(self) -> np.ndarray:
        return np.array([r.q_b for r in self.records])

    def per_cycle(self) -> np.ndarray | None:
        """Stacked per-cycle values, shape (n_traj, cycles, 2)."""
        if not self.records or self.records[0].per_cycle is None:
            return None
        return np.stack([r.per_cycle for r in self.records])

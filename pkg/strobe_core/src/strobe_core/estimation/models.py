"""Record ensembles and squeezing reports."""

import math
from pathlib import Path

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_validator,
    model_validator,
)

from strobe_core.errors import DegenerateError
from strobe_core.sim.dump import (
    cycle_shot_noise_variance,
    lockin_from_cycles,
    read_dump,
)
from strobe_core.sim.models import TwoPulseRun


def to_db(value: float) -> float:
    """10 log10(value); NaN for non-positive values."""
    return 10.0 * math.log10(value) if value > 0.0 else math.nan


class RecordEnsemble(BaseModel):
    """Lock-in values of a two-pulse experiment with their shot-noise levels.

    Attributes:
        qa: First-pulse values.
        qb: Second-pulse values.
        psn_a: Shot-noise variance of q_A.
        psn_b: Shot-noise variance of q_B.
        f_d: Mean-spin decay factor J_x(tau_A) / J_x(0).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    qa: np.ndarray
    qb: np.ndarray
    psn_a: float = Field(gt=0.0)
    psn_b: float = Field(gt=0.0)
    f_d: float = Field(default=1.0, gt=0.0, le=1.0)

    @field_validator("qa", "qb", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return np.asarray(value, dtype=float).reshape(-1)

    @model_validator(mode="after")
    def _check_lengths(self) -> "RecordEnsemble":
        if self.qa.size != self.qb.size:
            raise ValueError(
                f"qa and qb differ in length ({self.qa.size} vs {self.qb.size})"
            )
        if self.qa.size < 2:
            raise ValueError(f"need at least 2 records, got {self.qa.size}")
        return self

    def __len__(self) -> int:
        return int(self.qa.size)

    def resample(self, indices: np.ndarray) -> "RecordEnsemble":
        return self.model_copy(
            update={"qa": self.qa[indices], "qb": self.qb[indices]}
        )

    @classmethod
    def from_run(
        cls, run: TwoPulseRun, psn_a: float, psn_b: float
    ) -> "RecordEnsemble":
        return cls(qa=run.qa, qb=run.qb, psn_a=psn_a, psn_b=psn_b, f_d=run.f_d)

    @classmethod
    def from_dump(cls, path: Path) -> "RecordEnsemble":
        """Rebuild q_A, q_B and matching shot-noise levels from a record dump."""
        per_cycle, metadata = read_dump(path)
        if metadata.cycles_b == 0:
            raise DegenerateError(f"record dump {path} has no second pulse")
        qa, qb = lockin_from_cycles(per_cycle, metadata)
        return cls(
            qa=qa,
            qb=qb,
            psn_a=cycle_shot_noise_variance(metadata, "a"),
            psn_b=cycle_shot_noise_variance(metadata, "b"),
            f_d=metadata.f_d,
        )


class SqueezingReport(BaseModel):
    """Squeezing metrics of a two-pulse experiment.

    Oscillator noises are in units of shot noise (Var(q)/PSN - 1).

    Attributes:
        var_xm_a: Oscillator noise seen by pulse A.
        var_xm_b: Oscillator noise seen by pulse B.
        var_xm_b_given_a: Noise of pulse B conditioned on pulse A.
        xi_tilde_sq: var_xm_b_given_a / (var_xm_b f_d).
        xi_w_sq: Wineland parameter var_xm_b_given_a / (f_d^2 ground_ref).
        n_bar: Occupancy with the symmetric convention.
        n_bar_single_quadrature: Occupancy with the excess in one quadrature.
        ground_ref: Oscillator noise of the coherent spin state.
        f_d: Mean-spin decay factor.
        ci_lo_db: Lower bootstrap bound on xi_tilde_sq in dB, when computed.
        ci_hi_db: Upper bootstrap bound on xi_tilde_sq in dB, when computed.
    """

    model_config = ConfigDict(frozen=True)

    var_xm_a: float
    var_xm_b: float
    var_xm_b_given_a: float
    xi_tilde_sq: float
    xi_w_sq: float
    n_bar: float
    n_bar_single_quadrature: float
    ground_ref: float = Field(gt=0.0)
    f_d: float = Field(gt=0.0, le=1.0)
    ci_lo_db: float | None = None
    ci_hi_db: float | None = None

    @computed_field
    @property
    def xi_tilde_sq_db(self) -> float:
        return to_db(self.xi_tilde_sq)

    @computed_field
    @property
    def xi_w_sq_db(self) -> float:
        return to_db(self.xi_w_sq)

    def to_json_dict(self) -> dict[str, float | None]:
        """Report keys written by ``strobe report``."""
        return {
            "var_xm_a": self.var_xm_a,
            "var_xm_b": self.var_xm_b,
            "var_xm_b_given_a": self.var_xm_b_given_a,
            "xi_tilde_sq_db": self.xi_tilde_sq_db,
            "xi_w_sq_db": self.xi_w_sq_db,
            "n_bar": self.n_bar,
            "f_d": self.f_d,
            "ci_lo_db": self.ci_lo_db,
            "ci_hi_db": self.ci_hi_db,
        }

    def __str__(self) -> str:
        ci = ""
        if self.ci_lo_db is not None and self.ci_hi_db is not None:
            ci = f" [{self.ci_lo_db:.2f}, {self.ci_hi_db:.2f}]"
        return (
            f"SqueezingReport(xi_tilde^2={self.xi_tilde_sq_db:.2f} dB{ci}, "
            f"xi_W^2={self.xi_w_sq_db:.2f} dB, n_bar={self.n_bar:.4g}, "
            f"f_d={self.f_d:.4g})"
        )

"""Variance bookkeeping for a single stroboscopic probe pulse.

Quadrature variances are in ground-state units (a ground-state oscillator
has Var(x_in) = 1); polarimetry variances are in photon-number units.
"""

from pydantic import BaseModel, Field

from strobe_core.analytics.strobe import StrobeProfile
from strobe_core.errors import DomainError


class VariancePrediction(BaseModel):
    """Polarimetry and oscillator variances after one pulse.

    ``var_sy`` is the sum of the shot, input and back-action terms.
    """

    var_sy: float = Field(ge=0.0)
    var_x_out: float = Field(ge=0.0)
    shot_term: float = Field(ge=0.0)
    input_term: float = Field(ge=0.0)
    ba_term: float = Field(ge=0.0)

    def __str__(self) -> str:
        return (
            f"VariancePrediction(var_sy={self.var_sy:.6g} = "
            f"{self.shot_term:.6g} + {self.input_term:.6g} + {self.ba_term:.6g}, "
            f"var_x_out={self.var_x_out:.6g})"
        )


def predict_variances(
    kappa_tilde: float, profile: StrobeProfile, n_ph: float, var_x_in: float
) -> VariancePrediction:
    """Closed-form record and quadrature variances for one pulse.

    Args:
        kappa_tilde: Effective coupling strength.
        profile: Duty-cycle factors.
        n_ph: Photons in the pulse.
        var_x_in: Quadrature variance before the pulse.

    Returns:
        Var(S_y) = (b N_ph / 8)(1 + k Var(x_in) + c k^2 / 3) split into its
        three terms, and Var(x_out) = Var(x_in) + c k, with k = kappa_tilde^2.
    """
    if n_ph <= 0.0:
        raise DomainError(f"n_ph must be positive, got {n_ph!r}")
    if var_x_in < 0.0:
        raise DomainError(f"var_x_in must be non-negative, got {var_x_in!r}")
    k = kappa_tilde**2
    scale = profile.b * n_ph / 8.0
    shot = scale
    input_term = scale * k * var_x_in
    ba = scale * profile.c * k * k / 3.0
    return VariancePrediction(
        var_sy=shot + input_term + ba,
        var_x_out=var_x_in + profile.c * k,
        shot_term=shot,
        input_term=input_term,
        ba_term=ba,
    )


def predict_oscillator_noise(
    kappa_tilde: float, profile: StrobeProfile, var_x_in: float = 1.0
) -> float:
    """Record noise above shot noise, in shot-noise units.

    This is Var(S_y)/PSN - 1 = k Var(x_in) + c k^2 / 3.
    """
    k = kappa_tilde**2
    return k * var_x_in + profile.c * k * k / 3.0

"""Closed-form predictions for stroboscopic probing.

These functions are the reference the Monte-Carlo engine is checked against.
"""

from strobe_core.analytics.strobe import (
    StrobeProfile,
    ground_state_x_variance,
    one_minus_sinc,
    sinc,
    strobe_profile,
)
from strobe_core.analytics.variances import (
    VariancePrediction,
    predict_oscillator_noise,
    predict_variances,
)
from strobe_core.analytics.squeezing import (
    CavityOptimum,
    SqueezingPrediction,
    cavity_squeezing,
    conditional_squeezing,
    conditional_squeezing_from_covariances,
    gaussian_conditional_variance,
    optimal_cavity_squeezing,
    optimal_cavity_squeezing_numeric,
    total_squeezing,
)
from strobe_core.analytics.calibration import (
    NOISE_RATIO_CONVENTIONS,
    dark_thermalization,
    ground_noise_from_thermal,
    jz_variance_from_ratio,
    n_bar_from_noise_ratio,
    n_bar_from_quadratures,
    thermal_calibration_factor,
    thermal_jz_variance,
    thermal_signal_ratio,
)

__all__ = [
    # Duty cycle
    "StrobeProfile",
    "strobe_profile",
    "sinc",
    "one_minus_sinc",
    "ground_state_x_variance",
    # Single pulse
    "VariancePrediction",
    "predict_variances",
    "predict_oscillator_noise",
    # Squeezing
    "SqueezingPrediction",
    "CavityOptimum",
    "conditional_squeezing",
    "conditional_squeezing_from_covariances",
    "gaussian_conditional_variance",
    "total_squeezing",
    "optimal_cavity_squeezing",
    "cavity_squeezing",
    "optimal_cavity_squeezing_numeric",
    # Calibration
    "thermal_calibration_factor",
    "thermal_jz_variance",
    "thermal_signal_ratio",
    "jz_variance_from_ratio",
    "ground_noise_from_thermal",
    "dark_thermalization",
    "n_bar_from_quadratures",
    "n_bar_from_noise_ratio",
    "NOISE_RATIO_CONVENTIONS",
]

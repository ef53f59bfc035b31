"""Thermal-noise calibration of the projection noise and oscillator occupancy.

An unpolarized (thermal) ensemble has no back-action, so its polarimetry
noise above shot noise calibrates the coupling against a known <J_z^2>.
"""

import math
from collections.abc import Callable

from strobe_core.analytics.strobe import SERIES_THRESHOLD, StrobeProfile
from strobe_core.errors import DomainError, RangeError


def _growth_integral(a: float, tau: float, shift: float) -> float:
    # exp(-shift tau) * (exp(a tau) - 1) / a, with shift >= a keeping it finite
    x = a * tau
    if abs(x) < SERIES_THRESHOLD:
        return math.exp(-shift * tau) * tau * (1.0 + x / 2.0 + x * x / 6.0)
    if a > 0.0:
        return math.exp((a - shift) * tau) * -math.expm1(-x) / a
    return math.exp(-shift * tau) * math.expm1(x) / a


def _growth_integral_slope(b: float, tau: float, shift: float) -> float:
    # d/da of _growth_integral at a = b
    x = b * tau
    if abs(x) < SERIES_THRESHOLD:
        return math.exp(-shift * tau) * tau * tau * (0.5 + x / 3.0 + x * x / 8.0)
    return (math.exp((b - shift) * tau) * (x - 1.0) + math.exp(-shift * tau)) / (b * b)


def thermal_calibration_factor(gamma: float, gamma_m: float, tau: float) -> float:
    """Fraction of the ideal thermal signal left by transverse decay.

    Args:
        gamma: Decay rate of the spin correlations (1/s).
        gamma_m: Rate of the lock-in mode function (positive = rising).
        tau: Pulse length (s).

    Returns:
        1 without decay, falling to 0 when gamma * tau is large. For
        gamma_m = gamma it reduces to (1 + x - x coth x) / x with x = gamma tau.
    """
    if tau <= 0.0:
        raise DomainError(f"tau must be positive, got {tau!r}")
    if gamma < 0.0:
        raise DomainError(f"gamma must be non-negative, got {gamma!r}")
    a_hi = 2.0 * gamma_m
    a_lo = gamma_m - gamma
    spread = gamma_m + gamma
    shift = max(a_hi, a_lo, 0.0)
    # Removable singularity: the difference quotient becomes a derivative.
    if abs(spread * tau) < SERIES_THRESHOLD:
        quotient = _growth_integral_slope(0.5 * (a_hi + a_lo), tau, shift)
    else:
        quotient = (
            _growth_integral(a_hi, tau, shift) - _growth_integral(a_lo, tau, shift)
        ) / spread
    return 2.0 * quotient / _growth_integral(a_hi, tau, shift) / tau


def thermal_jz_variance(n_at: float, F: int = 4) -> float:
    """<J_z^2> of a fully unpolarized ensemble seen on the upper hyperfine level.

    The F manifold holds (2F+1)/(4F) of the atoms, each with F(F+1)/3.
    """
    return (2 * F + 1) / (4.0 * F) * n_at * F * (F + 1) / 3.0


def thermal_signal_ratio(
    beta: float,
    flux_bar: float,
    tau: float,
    jz_var: float,
    gamma: float,
    gamma_m: float,
    profile: StrobeProfile,
) -> float:
    """Predicted polarimetry noise of a thermal ensemble over shot noise.

    ratio - 1 = beta^2 S_x tau b G <J_z^2> with S_x = flux_bar / 2 and G the
    calibration factor; b = 1 for continuous probing.
    """
    factor = thermal_calibration_factor(gamma, gamma_m, tau)
    return 1.0 + beta**2 * 0.5 * flux_bar * tau * profile.b * factor * jz_var


def jz_variance_from_ratio(
    ratio: float,
    beta: float,
    flux_bar: float,
    tau: float,
    gamma: float,
    gamma_m: float,
    profile: StrobeProfile,
) -> float:
    """Invert thermal_signal_ratio for the measured <J_z^2>."""
    factor = thermal_calibration_factor(gamma, gamma_m, tau)
    scale = beta**2 * 0.5 * flux_bar * tau * profile.b * factor
    if scale <= 0.0:
        raise DomainError("calibration has no signal; beta, flux_bar or tau is zero")
    return (ratio - 1.0) / scale


def ground_noise_from_thermal(thermal_ratio: float, F: int = 4) -> float:
    """Ground-state noise above shot noise implied by a thermal measurement.

    Raises:
        DomainError: If the thermal noise lies below shot noise.
    """
    if thermal_ratio < 1.0:
        raise DomainError(
            f"thermal noise ratio {thermal_ratio:.6g} is below shot noise"
        )
    return 6.0 * F / ((F + 1) * (2 * F + 1)) * (thermal_ratio - 1.0)


def dark_thermalization(t: float, t1: float, f_factor: float, F: int = 4) -> float:
    """Occupancy gained in the dark, f (exp(t / T_1) - 1).

    Args:
        t: Dark time (s), at most T_1.
        t1: Longitudinal lifetime (s).
        f_factor: Spin-structure factor between F/2 and (F+1)(2F+1)/2.
        F: Ground-state spin.

    Raises:
        RangeError: If t is negative or beyond T_1.
        DomainError: If f_factor is outside its physical range.
    """
    if t1 <= 0.0:
        raise DomainError(f"t1 must be positive, got {t1!r}")
    if t < 0.0 or t > t1:
        raise RangeError(f"t = {t!r} s is outside [0, T1 = {t1!r}]")
    f_min, f_max = F / 2.0, (F + 1) * (2 * F + 1) / 2.0
    if not f_min <= f_factor <= f_max:
        raise DomainError(
            f"f_factor {f_factor!r} outside [{f_min:g}, {f_max:g}] for F={F}"
        )
    return f_factor * math.expm1(t / t1)


def n_bar_from_quadratures(var_x: float, var_p: float) -> float:
    """Occupancy from both quadrature variances, Var(X) + Var(P) - 1."""
    return var_x + var_p - 1.0


NOISE_RATIO_CONVENTIONS: dict[str, Callable[[float], float]] = {
    "symmetric": lambda ratio: ratio - 1.0,
    "single_quadrature": lambda ratio: 0.5 * (ratio - 1.0),
}


def n_bar_from_noise_ratio(ratio: float, convention: str = "symmetric") -> float:
    """Occupancy from a measured noise over the ground-state noise.

    ``symmetric`` reads the ratio as (Var(X) + Var(P)) relative to the
    ground state; ``single_quadrature`` as one quadrature alone.
    """
    if convention not in NOISE_RATIO_CONVENTIONS:
        raise ValueError(
            f"Unknown n_bar convention {convention!r}. "
            f"Available: {list(NOISE_RATIO_CONVENTIONS)}"
        )
    return NOISE_RATIO_CONVENTIONS[convention](ratio)

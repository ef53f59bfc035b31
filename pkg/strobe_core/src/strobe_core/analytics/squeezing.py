"""Conditional squeezing, decoherence and the cavity optimum."""

import functools
import logging
import math
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy.integrate import dblquad, quad
from scipy.optimize import minimize_scalar

from strobe_core.analytics.strobe import StrobeProfile
from strobe_core.errors import DegenerateError, DomainError
from strobe_core.physics.cavity import output_power_factor
from strobe_core.physics.models import CavityConfig

logger = logging.getLogger(__name__)


class SqueezingPrediction(BaseModel):
    """Coherent squeezing plus the probe-induced decoherence penalty."""

    xi0_sq: float = Field(gt=0.0)
    eta_tau: float = Field(ge=0.0)
    xi_sq: float = Field(gt=0.0)
    zeta: float = Field(ge=0.0)
    d_eff: float = Field(gt=0.0)

    @property
    def xi_sq_db(self) -> float:
        return 10.0 * math.log10(self.xi_sq)

    def __str__(self) -> str:
        return (
            f"SqueezingPrediction(xi0_sq={self.xi0_sq:.6g}, "
            f"eta_tau={self.eta_tau:.6g}, xi_sq={self.xi_sq:.6g} "
            f"({self.xi_sq_db:+.2f} dB))"
        )


class CavityOptimum(BaseModel):
    """Best squeezing found by the numerical cavity search."""

    xi_sq: float
    kappa0_sq: float = Field(gt=0.0)
    t_out: float = Field(gt=0.0, lt=1.0)


@functools.cache
def _log_ratio_convention() -> None:
    # Logged once per process.
    logger.info(
        "conditional squeezing uses (1 - sinc)/(1 + sinc) for the back-action "
        "ratio in the covariance and record terms"
    )


def conditional_squeezing(kappa_tilde: float, profile: StrobeProfile) -> float:
    """Squeezing of the measured quadrature conditioned on the record.

    For k = kappa_tilde^2 and back-action coupling c this is
    1 + c k - k (1 + c k / 2)^2 / (1 + k + c k^2 / 3), which tends to
    1 / (1 + k) as the duty cycle goes to zero.
    """
    if kappa_tilde < 0.0:
        raise DomainError(f"kappa_tilde must be non-negative, got {kappa_tilde!r}")
    _log_ratio_convention()
    k = kappa_tilde**2
    c = profile.c
    return 1.0 + c * k - k * (1.0 + 0.5 * c * k) ** 2 / (1.0 + k + c * k * k / 3.0)


def gaussian_conditional_variance(
    cov: np.ndarray, target: int, given: Sequence[int]
) -> float:
    """Variance of one Gaussian component conditioned on others.

    Args:
        cov: Joint covariance matrix.
        target: Index of the conditioned variable.
        given: Indices of the observed variables.

    Returns:
        cov[t, t] - cov[t, g] cov[g, g]^-1 cov[g, t].
    """
    cov = np.asarray(cov, dtype=float)
    idx = list(given)
    if not idx:
        return float(cov[target, target])
    sigma_gg = cov[np.ix_(idx, idx)]
    sigma_tg = cov[target, idx]
    try:
        solved = np.linalg.solve(sigma_gg, sigma_tg)
    except np.linalg.LinAlgError as exc:
        raise DegenerateError("observed block of the covariance is singular") from exc
    return float(cov[target, target] - sigma_tg @ solved)


def _window_averages(duty: float) -> tuple[float, float]:
    """Averages of cos^2 and sin^2 of the oscillator phase over the lit windows.

    Windows of phase width pi D sit on both turning points of the measured
    quadrature; by symmetry one window gives the period average.
    """
    half = 0.5 * math.pi * duty
    width = 2.0 * half
    cos_sq, _ = quad(lambda t: math.cos(t) ** 2, -half, half, epsabs=0.0, epsrel=1e-13)
    sin_sq, _ = quad(lambda t: math.sin(t) ** 2, -half, half, epsabs=0.0, epsrel=1e-13)
    return cos_sq / width, sin_sq / width


@functools.cache
def _accumulation_integrals() -> tuple[float, float]:
    """Back-action growth over a unit-length pulse.

    Returns the integral of u over [0, 1] (kicks shared with the final
    quadrature) and the integral of min(u, v) over the unit square (kicks
    shared between two record times), taken as twice the lower triangle.
    """
    linear, _ = quad(lambda u: u, 0.0, 1.0, epsabs=0.0, epsrel=1e-13)
    triangle, _ = dblquad(
        lambda v, u: v, 0.0, 1.0, 0.0, lambda u: u, epsabs=0.0, epsrel=1e-13
    )
    return linear, 2.0 * triangle


def conditional_squeezing_from_covariances(
    kappa_tilde: float, profile: StrobeProfile, n_ph: float = 1.0
) -> float:
    """Conditional squeezing assembled from the joint (x_out, S_y) covariance.

    The covariance entries come from quadratures of the window weights and of
    the back-action accumulation, not from the closed-form duty factors; only
    ``profile.duty`` is used. The pulse strength is fixed by
    beta^2 J_x = 4 k / (N_ph b); the result is independent of n_ph.
    """
    if kappa_tilde < 0.0:
        raise DomainError(f"kappa_tilde must be non-negative, got {kappa_tilde!r}")
    k = kappa_tilde**2
    cos_sq, sin_sq = _window_averages(profile.duty)
    linear, shared = _accumulation_integrals()
    b = 2.0 * cos_sq
    ratio = sin_sq / cos_sq
    var0 = b**2 / 8.0
    beta_sqrt_jx = math.sqrt(4.0 * k / (n_ph * b))
    var_x = var0 * (1.0 + ratio * k)
    cov_xs = beta_sqrt_jx * n_ph / 16.0 * b**2 * (1.0 + linear * ratio * k)
    var_s = n_ph * b / 8.0 * (1.0 + k + shared * ratio * k * k)
    cov = np.array([[var_x, cov_xs], [cov_xs, var_s]])
    return gaussian_conditional_variance(cov, 0, [1]) / var0


def total_squeezing(
    xi0_sq: float,
    zeta: float,
    kappa_tilde: float,
    d_eff: float,
    cavity: CavityConfig | None = None,
) -> SqueezingPrediction:
    """Add the probe-induced decoherence noise to the coherent squeezing.

    Args:
        xi0_sq: Coherent conditional squeezing.
        zeta: Decoherence prefactor (polarization and detuning dependent).
        kappa_tilde: Coupling before any cavity enhancement.
        d_eff: Effective resonant optical depth.
        cavity: When given, the intracavity power penalty 2/T_2 - 1 applies.

    Raises:
        DomainError: For d_eff <= 0, zeta < 0 or an output coupler with T_2 = 0.
    """
    if d_eff <= 0.0:
        raise DomainError(f"d_eff must be positive, got {d_eff!r}")
    if zeta < 0.0:
        raise DomainError(f"zeta must be non-negative, got {zeta!r}")
    eta = zeta * kappa_tilde**2 / d_eff
    if cavity is not None:
        eta *= output_power_factor(cavity.t_out)
    return SqueezingPrediction(
        xi0_sq=xi0_sq, eta_tau=eta, xi_sq=xi0_sq + eta, zeta=zeta, d_eff=d_eff
    )


def optimal_cavity_squeezing(
    zeta: float, d0: float, finesse: float, loss: float
) -> tuple[float, float]:
    """Closed-form optimum over photon number and output coupling.

    Args:
        zeta: Decoherence prefactor.
        d0: Single-pass optical depth.
        finesse: Cavity finesse at the optimum coupling.
        loss: Round-trip intracavity loss.

    Returns:
        (xi_opt_sq, t2_opt) with r = zeta / ((2F/pi) d0),
        xi_opt_sq = (2 - sqrt(r)) sqrt(r) and t2_opt = loss.

    Raises:
        DomainError: If an input is not positive or r > 1.
    """
    inputs = {"zeta": zeta, "d0": d0, "finesse": finesse, "loss": loss}
    for name, value in inputs.items():
        if value <= 0.0:
            raise DomainError(f"{name} must be positive, got {value!r}")
    r = zeta / (2.0 * finesse / math.pi * d0)
    if r > 1.0:
        raise DomainError(
            f"zeta / ((2F/pi) d0) = {r:.3g} exceeds 1; "
            "the closed-form optimum does not apply"
        )
    root = math.sqrt(r)
    return (2.0 - root) * root, loss


def cavity_squeezing(
    kappa0_sq: float,
    t_out: float,
    zeta: float,
    d0: float,
    loss: float,
    t_in: float = 0.0,
    exact: bool = False,
) -> float:
    """Squeezing for a cavity whose finesse is set by its mirrors.

    kappa0_sq is the single-pass coupling (proportional to N_ph); the cavity
    multiplies it by (2F/pi)^2 and the decoherence by 2/T_2, or by 2/T_2 - 1
    when ``exact`` is set.
    """
    if t_out <= 0.0:
        raise DomainError("output coupler transmission must be positive")
    gain = (4.0 / (t_in + t_out + loss)) ** 2
    power = output_power_factor(t_out) if exact else 2.0 / t_out
    return 1.0 / (1.0 + gain * kappa0_sq) + zeta * kappa0_sq / d0 * power


def _best_kappa(
    t_out: float, zeta: float, d0: float, loss: float, t_in: float, exact: bool
) -> tuple[float, float]:
    result = minimize_scalar(
        lambda log_k: cavity_squeezing(
            math.exp(log_k), t_out, zeta, d0, loss, t_in=t_in, exact=exact
        ),
        bounds=(math.log(1e-9), math.log(1e6)),
        method="bounded",
        options={"xatol": 1e-9},
    )
    return float(result.fun), math.exp(result.x)


def optimal_cavity_squeezing_numeric(
    zeta: float,
    d0: float,
    loss: float,
    t_in: float = 0.0,
    exact: bool = False,
    n_grid: int = 200,
) -> CavityOptimum:
    """Search photon number and output coupling for the best squeezing.

    A log-spaced grid over T_2 brackets the optimum; a bounded scalar search
    over log T_2 then refines it, with the photon number optimized inside.
    """
    if zeta <= 0.0 or d0 <= 0.0 or loss < 0.0:
        raise DomainError("zeta and d0 must be positive and loss non-negative")
    grid = np.geomspace(1e-4, 0.99, n_grid)
    values = [_best_kappa(t2, zeta, d0, loss, t_in, exact)[0] for t2 in grid]
    i = int(np.argmin(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, n_grid - 1)]
    refined = minimize_scalar(
        lambda log_t2: _best_kappa(math.exp(log_t2), zeta, d0, loss, t_in, exact)[0],
        bounds=(math.log(lo), math.log(hi)),
        method="bounded",
        options={"xatol": 1e-8},
    )
    t_out = math.exp(refined.x)
    xi_sq, kappa0_sq = _best_kappa(t_out, zeta, d0, loss, t_in, exact)
    logger.debug(
        "optimal_cavity_squeezing_numeric xi_sq=%.6g t_out=%.6g kappa0_sq=%.6g",
        xi_sq,
        t_out,
        kappa0_sq,
    )
    return CavityOptimum(xi_sq=xi_sq, kappa0_sq=kappa0_sq, t_out=t_out)

"""Variance estimators for two-pulse records."""

import logging
import warnings

import numpy as np

from strobe_core.analytics.calibration import n_bar_from_noise_ratio
from strobe_core.errors import DegenerateError, DomainError, NegativeNoiseWarning
from strobe_core.estimation.models import RecordEnsemble, SqueezingReport

logger = logging.getLogger(__name__)


def conditional_variance(qa: np.ndarray, qb: np.ndarray) -> tuple[float, float, float]:
    """Sample variance of q_B, covariance with q_A, and Var(q_B | q_A).

    Uses n - 1 denominators. The conditional variance is the residual variance
    of the least-squares prediction of q_B from q_A, so it never exceeds
    Var(q_B).

    Raises:
        DegenerateError: With fewer than 2 records or constant q_A.
    """
    qa = np.asarray(qa, dtype=float)
    qb = np.asarray(qb, dtype=float)
    if qa.size < 2 or qa.size != qb.size:
        raise DegenerateError(
            "need two equal-length record sets of size >= 2, "
            f"got {qa.size} and {qb.size}"
        )
    cov = np.cov(qa, qb, ddof=1)
    var_a, cov_ab, var_b = float(cov[0, 0]), float(cov[0, 1]), float(cov[1, 1])
    if var_a <= 0.0:
        raise DegenerateError("q_A has zero variance")
    var_b_given_a = max(var_b - cov_ab**2 / var_a, 0.0)
    return var_b, cov_ab, var_b_given_a


def oscillator_noise(var_record: float, psn: float) -> float:
    """Record variance above shot noise, Var(q)/PSN - 1.

    Warns with NegativeNoiseWarning when the record is quieter than shot
    noise, which points at a miscalibrated PSN.
    """
    if psn <= 0.0:
        raise DomainError(f"shot-noise variance must be positive, got {psn!r}")
    noise = var_record / psn - 1.0
    if noise < 0.0:
        logger.warning("negative oscillator noise %.4g; check the PSN level", noise)
        warnings.warn(
            f"oscillator noise {noise:.4g} is below zero",
            NegativeNoiseWarning,
            stacklevel=2,
        )
    return noise


def squeezing_report(
    records: RecordEnsemble, ground_ref: float, ground_ref_a: float | None = None
) -> SqueezingReport:
    """Squeezing metrics from two-pulse records.

    Args:
        records: q_A, q_B with their shot-noise levels and f_d.
        ground_ref: Oscillator noise of the coherent spin state seen by pulse B.
        ground_ref_a: Same for pulse A; defaults to ``ground_ref``. The
            occupancy is inferred from var_xm_a against this value.

    Raises:
        DomainError: If a ground reference is not positive.
        DegenerateError: If pulse B sees no oscillator noise.
    """
    if ground_ref <= 0.0:
        raise DomainError(f"ground_ref must be positive, got {ground_ref!r}")
    ground_ref_a = ground_ref if ground_ref_a is None else ground_ref_a
    if ground_ref_a <= 0.0:
        raise DomainError(f"ground_ref_a must be positive, got {ground_ref_a!r}")

    var_b, _, var_b_given_a = conditional_variance(records.qa, records.qb)
    var_a = float(np.var(records.qa, ddof=1))
    var_xm_a = oscillator_noise(var_a, records.psn_a)
    var_xm_b = oscillator_noise(var_b, records.psn_b)
    var_xm_b_given_a = oscillator_noise(var_b_given_a, records.psn_b)
    if var_xm_b == 0.0:
        raise DegenerateError("pulse B records carry no oscillator noise")

    ratio = var_xm_a / ground_ref_a
    report = SqueezingReport(
        var_xm_a=var_xm_a,
        var_xm_b=var_xm_b,
        var_xm_b_given_a=var_xm_b_given_a,
        xi_tilde_sq=var_xm_b_given_a / (var_xm_b * records.f_d),
        xi_w_sq=var_xm_b_given_a / (records.f_d**2 * ground_ref),
        n_bar=n_bar_from_noise_ratio(ratio, "symmetric"),
        n_bar_single_quadrature=n_bar_from_noise_ratio(ratio, "single_quadrature"),
        ground_ref=ground_ref,
        f_d=records.f_d,
    )
    logger.debug("squeezing_report n=%d %s", len(records), report)
    return report

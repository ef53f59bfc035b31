"""Percentile bootstrap for squeezing metrics."""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from strobe_core.config import StrobeConfig
from strobe_core.errors import DegenerateError, DomainError
from strobe_core.estimation.estimators import conditional_variance
from strobe_core.estimation.models import RecordEnsemble, to_db

logger = logging.getLogger(__name__)

Metric = Callable[[RecordEnsemble, float], float]

# 68 % interval
LOWER_PERCENTILE = 16.0
UPPER_PERCENTILE = 84.0


def _noises(records: RecordEnsemble) -> tuple[float, float, float]:
    # Same quantities as squeezing_report, without per-resample warnings.
    var_b, _, var_b_given_a = conditional_variance(records.qa, records.qb)
    var_a = float(np.var(records.qa, ddof=1))
    return (
        var_a / records.psn_a - 1.0,
        var_b / records.psn_b - 1.0,
        var_b_given_a / records.psn_b - 1.0,
    )


def _xi_tilde_sq(records: RecordEnsemble, ground_ref: float) -> float:
    _, var_xm_b, var_xm_b_given_a = _noises(records)
    return var_xm_b_given_a / (var_xm_b * records.f_d)


def _xi_w_sq(records: RecordEnsemble, ground_ref: float) -> float:
    _, _, var_xm_b_given_a = _noises(records)
    return var_xm_b_given_a / (records.f_d**2 * ground_ref)


METRIC_REGISTRY: dict[str, Metric] = {
    "var_xm_a": lambda records, ground_ref: _noises(records)[0],
    "var_xm_b": lambda records, ground_ref: _noises(records)[1],
    "var_xm_b_given_a": lambda records, ground_ref: _noises(records)[2],
    "xi_tilde_sq": _xi_tilde_sq,
    "xi_tilde_sq_db": lambda records, g: to_db(_xi_tilde_sq(records, g)),
    "xi_w_sq_db": lambda records, g: to_db(_xi_w_sq(records, g)),
}


def get_metric(metric: str | Metric) -> Metric:
    """Resolve a metric name or pass a callable through."""
    if not isinstance(metric, str):
        return metric
    if metric not in METRIC_REGISTRY:
        raise ValueError(
            f"Unknown metric {metric!r}. Available: {list(METRIC_REGISTRY)}"
        )
    return METRIC_REGISTRY[metric]


def bootstrap_ci(
    metric: str | Metric,
    records: RecordEnsemble,
    n_resamples: int | None = None,
    seed: int = 0,
    ground_ref: float = 1.0,
    jobs: int = 1,
) -> tuple[float, float]:
    """Percentile bootstrap 68 % interval of a metric.

    Resample i draws its indices from the i-th child of SeedSequence(seed), so
    the interval is deterministic and the first n resamples do not change
    when n_resamples grows.

    Args:
        metric: Registry name or callable (records, ground_ref) -> float.
        records: Two-pulse records.
        n_resamples: Number of resamples (>= 100); defaults to
            StrobeConfig().bootstrap_resamples.
        seed: Root seed.
        ground_ref: Ground-state oscillator noise for Wineland metrics.
        jobs: Worker threads.

    Returns:
        (lo, hi) at the 16th and 84th percentiles.

    Raises:
        DomainError: If n_resamples < 100.
        DegenerateError: If no resample gives a finite metric.
    """
    fn = get_metric(metric)
    n_resamples = n_resamples or StrobeConfig().bootstrap_resamples
    if n_resamples < 100:
        raise DomainError(f"n_resamples must be at least 100, got {n_resamples}")
    n = len(records)
    children = np.random.SeedSequence(seed).spawn(n_resamples)

    def one(child: np.random.SeedSequence) -> float:
        indices = np.random.default_rng(child).integers(0, n, size=n)
        return fn(records.resample(indices), ground_ref)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = np.array(list(pool.map(one, children)))
    else:
        values = np.array([one(child) for child in children])

    finite = values[np.isfinite(values)]
    if finite.size == 0:
        raise DegenerateError("metric is not finite on any bootstrap resample")
    if finite.size < values.size:
        logger.warning(
            "bootstrap dropped %d of %d non-finite resamples",
            values.size - finite.size,
            values.size,
        )
    lo, hi = np.percentile(finite, [LOWER_PERCENTILE, UPPER_PERCENTILE])
    logger.debug(
        "bootstrap_ci n_resamples=%d seed=%d lo=%.6g hi=%.6g", n_resamples, seed, lo, hi
    )
    return float(lo), float(hi)

"""Estimators turning two-pulse records into squeezing metrics."""

from strobe_core.estimation.models import RecordEnsemble, SqueezingReport, to_db
from strobe_core.estimation.estimators import (
    conditional_variance,
    oscillator_noise,
    squeezing_report,
)
from strobe_core.estimation.bootstrap import METRIC_REGISTRY, bootstrap_ci, get_metric

__all__ = [
    "RecordEnsemble",
    "SqueezingReport",
    "to_db",
    "conditional_variance",
    "oscillator_noise",
    "squeezing_report",
    "METRIC_REGISTRY",
    "get_metric",
    "bootstrap_ci",
]

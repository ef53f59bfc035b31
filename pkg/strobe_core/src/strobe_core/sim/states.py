"""Initial oscillator states."""

import logging
from collections.abc import Callable

import numpy as np
from scipy.optimize import brentq

from strobe_core.analytics.calibration import thermal_jz_variance
from strobe_core.errors import DomainError
from strobe_core.physics.models import EnsembleConfig
from strobe_core.sim.models import OscillatorState

logger = logging.getLogger(__name__)


def spin_temperature_populations(orientation: float, F: int = 4) -> np.ndarray:
    """Zeeman populations of a spin-temperature distribution.

    Index 0 is the end state m = -F and p_m is proportional to eps^(m + F),
    with eps chosen so that -<m>/F equals the orientation.

    Args:
        orientation: Spin orientation in [0, 1].
        F: Ground-state spin.

    Returns:
        2F+1 probabilities summing to 1.
    """
    if not 0.0 <= orientation <= 1.0:
        raise DomainError(f"orientation must be in [0, 1], got {orientation!r}")
    k = np.arange(2 * F + 1, dtype=float)
    if orientation == 1.0:
        populations = np.zeros_like(k)
        populations[0] = 1.0
        return populations
    if orientation == 0.0:
        return np.full_like(k, 1.0 / k.size)

    def mean_k(eps: float) -> float:
        weights = eps**k
        return float(weights @ k / weights.sum())

    target = F * (1.0 - orientation)
    eps = brentq(lambda e: mean_k(e) - target, 0.0, 1.0, xtol=1e-15)
    weights = eps**k
    return weights / weights.sum()


def _ground(ensemble: EnsembleConfig, n_bar: float) -> OscillatorState:
    return _thermal_occupancy(ensemble, 0.0)


def _thermal_occupancy(ensemble: EnsembleConfig, n_bar: float) -> OscillatorState:
    if n_bar < 0.0:
        raise DomainError(f"n_bar must be non-negative, got {n_bar!r}")
    if ensemble.jx <= 0.0:
        raise DomainError("a coherent-spin oscillator needs a polarized ensemble")
    var = 0.5 * (1.0 + n_bar)
    return OscillatorState(
        mean=np.zeros(2),
        cov=np.diag([var, var]),
        jx=ensemble.jx,
        jx_ref=ensemble.jx,
    )


def _unpolarized_thermal(ensemble: EnsembleConfig, n_bar: float) -> OscillatorState:
    jx_ref = ensemble.n_at * ensemble.F
    var = thermal_jz_variance(ensemble.n_at, ensemble.F) / jx_ref
    return OscillatorState(
        mean=np.zeros(2),
        cov=np.diag([var, var]),
        jx=0.0,
        jx_ref=jx_ref,
        bath_var=var,
    )


INIT_KINDS: dict[str, Callable[[EnsembleConfig, float], OscillatorState]] = {
    "ground": _ground,
    "thermal_occupancy": _thermal_occupancy,
    "unpolarized_thermal": _unpolarized_thermal,
}


def init_state(
    kind: str, ensemble: EnsembleConfig, n_bar: float = 0.0
) -> OscillatorState:
    """Prepare the initial oscillator state.

    Args:
        kind: ``ground``, ``thermal_occupancy`` or ``unpolarized_thermal``.
        ensemble: Atomic ensemble.
        n_bar: Occupancy for ``thermal_occupancy``, split evenly between
            the quadratures so that Var(X) + Var(P) - 1 = n_bar.

    Raises:
        ValueError: For an unknown kind.
        DomainError: For n_bar < 0 or an unpolarized ensemble in a
            coherent-spin state.
    """
    if kind not in INIT_KINDS:
        raise ValueError(f"Unknown init kind {kind!r}. Available: {list(INIT_KINDS)}")
    state = INIT_KINDS[kind](ensemble, n_bar)
    logger.debug("init_state kind=%s %s", kind, state)
    return state

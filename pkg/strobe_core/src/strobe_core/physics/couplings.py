"""Polarizabilities and light-atom coupling constants."""

import logging
import math

from strobe_core.analytics.strobe import strobe_profile
from strobe_core.config import StrobeConfig
from strobe_core.errors import PoleError
from strobe_core.physics.models import (
    AtomicTransition,
    CavityConfig,
    CouplingSet,
    EnsembleConfig,
    ProbeConfig,
)

logger = logging.getLogger(__name__)


def _pole_ratio(detuning: float, pole: float) -> float:
    # 1 / (1 - pole/detuning) written so that pole = 0 gives exactly 1
    return detuning / (detuning - pole)


def polarizabilities(
    transition: AtomicTransition,
    detuning: float,
    guard_linewidths: float | None = None,
) -> tuple[float, float, float]:
    """Scalar, vector and tensor polarizabilities of the F=4 ground state.

    Args:
        transition: Excited-state structure.
        detuning: Probe detuning from the F'=5 line (rad/s).
        guard_linewidths: Pole exclusion radius in linewidths. Defaults to
            ``StrobeConfig().pole_guard_linewidths``.

    Returns:
        (a0, a1, a2), dimensionless. Far detuned they approach (4, 1, 0).

    Raises:
        PoleError: If the detuning lies within the guard of 0, delta_35
            or delta_45.
    """
    if guard_linewidths is None:
        guard_linewidths = StrobeConfig().pole_guard_linewidths
    guard = guard_linewidths * transition.gamma
    for name, pole in (
        ("F'=5", 0.0),
        ("F'=4", transition.delta_45),
        ("F'=3", transition.delta_35),
    ):
        if abs(detuning - pole) < guard:
            raise PoleError(
                f"detuning {detuning:.6g} rad/s is within {guard:.3g} rad/s "
                f"of the {name} resonance"
            )

    r35 = _pole_ratio(detuning, transition.delta_35)
    r45 = _pole_ratio(detuning, transition.delta_45)
    a0 = 0.25 * (r35 + 7.0 * r45 + 8.0)
    a1 = (-35.0 * r35 - 21.0 * r45 + 176.0) / 120.0
    a2 = (5.0 * r35 - 21.0 * r45 + 16.0) / 240.0
    return a0, a1, a2


def coupling_set(
    transition: AtomicTransition,
    ensemble: EnsembleConfig,
    probe: ProbeConfig,
    duty: float,
    guard_linewidths: float | None = None,
) -> CouplingSet:
    """Derive beta, kappa, kappa_tilde, w and gamma_sw for a probe pulse.

    kappa uses the macroscopic spin J_x so that kappa_tilde = kappa * sqrt(B)
    holds exactly. gamma_sw is the period-averaged tensor swap rate; it is
    positive for y-polarized input (S_x < 0).
    """
    a0, a1, a2 = polarizabilities(transition, probe.detuning, guard_linewidths)
    beta = (
        -transition.gamma
        / (8.0 * probe.area * probe.detuning)
        * transition.wavelength**2
        / (2.0 * math.pi)
        * a1
    )
    profile = strobe_profile(duty)
    kappa = 0.5 * abs(beta) * math.sqrt(probe.n_ph * ensemble.jx)
    kappa_tilde = kappa * math.sqrt(profile.b)
    w = 14.0 * a2 / a1 if a1 != 0.0 else 0.0
    gamma_sw = -probe.sx_sign * w * beta**2 * ensemble.n_at * probe.flux_bar
    couplings = CouplingSet(
        a0=a0,
        a1=a1,
        a2=a2,
        beta=beta,
        kappa=kappa,
        kappa_tilde=kappa_tilde,
        w=w,
        gamma_sw=gamma_sw,
    )
    logger.debug("coupling_set duty=%.4g %s", duty, couplings)
    return couplings


def cavity_enhance(coupling: CouplingSet, cavity: CavityConfig) -> CouplingSet:
    """Scale kappa and kappa_tilde by the cavity factor 2F/pi.

    beta itself is unchanged; the factor is carried in ``enhancement`` and
    reaches the simulator through ``beta_eff``.
    """
    finesse = cavity.finesse
    if finesse < 5.0:
        logger.warning(
            "cavity finesse %.3g is low; the 2F/pi enhancement is approximate",
            finesse,
        )
    factor = 2.0 * finesse / math.pi
    return coupling.model_copy(
        update={
            "kappa": coupling.kappa * factor,
            "kappa_tilde": coupling.kappa_tilde * factor,
            "enhancement": coupling.enhancement * factor,
        }
    )

"""Protocols run at each sweep point, with their closed-form predictions.

Every protocol returns analytic and empirical quantities in the same units:
``single_pulse_noise`` and ``thermal_calibration`` in shot-noise units,
``back_action_sweep`` in ground-state units and ``two_pulse_squeezing`` as a
squeezing ratio.
"""

import logging
import math
from collections.abc import Callable
from typing import Literal, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from strobe_core.analytics.calibration import (
    jz_variance_from_ratio,
    thermal_jz_variance,
    thermal_signal_ratio,
)
from strobe_core.analytics.squeezing import (
    SqueezingPrediction,
    conditional_squeezing,
    total_squeezing,
)
from strobe_core.analytics.strobe import StrobeProfile, strobe_profile
from strobe_core.analytics.variances import predict_oscillator_noise
from strobe_core.config import StrobeConfig
from strobe_core.errors import ConfigError, DomainError
from strobe_core.estimation.bootstrap import bootstrap_ci
from strobe_core.estimation.estimators import oscillator_noise, squeezing_report
from strobe_core.estimation.models import RecordEnsemble, SqueezingReport, to_db
from strobe_core.harness.scenario import ScenarioConfig
from strobe_core.physics.cavity import (
    enhanced_absorption,
    output_power_factor,
    resonant_transmission,
)
from strobe_core.physics.couplings import cavity_enhance, coupling_set
from strobe_core.physics.models import CavityConfig, CouplingSet, EnsembleConfig
from strobe_core.sim.engine import (
    flux_for_kappa_tilde_sq,
    kappa_tilde_sq_for,
    run_two_pulse,
    shot_noise_reference,
    shot_noise_variance,
)
from strobe_core.sim.models import (
    ModeFunction,
    OscillatorState,
    PulseSchedule,
    TwoPulseRun,
)
from strobe_core.sim.rng import derived_seed
from strobe_core.sim.states import init_state

logger = logging.getLogger(__name__)

# Sub-streams of a point seed for the ground-state reference runs.
_REFERENCE_KEYS = {"a": 1, "b": 2}


class PointSetup(NamedTuple):
    """Everything a protocol needs at one sweep point."""

    ensemble: EnsembleConfig
    schedule: PulseSchedule
    coupling: CouplingSet
    coupling_b: CouplingSet
    init: OscillatorState
    mode_a: ModeFunction
    mode_b: ModeFunction
    profile: StrobeProfile
    kappa_tilde_sq_a: float
    kappa_tilde_sq_b: float
    psn_a: float
    psn_b: float
    d_eff: float
    cavity: CavityConfig | None
    keep_cycles: bool = False


class ProtocolResult(BaseModel):
    """Analytic and empirical quantities of one sweep point.

    Both dicts carry ``var``, the quantity compared across the sweep; the
    empirical dict adds its 68 % interval as ``ci_lo`` and ``ci_hi``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    analytic: dict[str, float]
    empirical: dict[str, float]
    report: SqueezingReport | None = None
    run: TwoPulseRun | None = Field(default=None, exclude=True)


Protocol = Callable[[PointSetup, ScenarioConfig, int, StrobeConfig], ProtocolResult]


def _pulse_fluxes(
    config: ScenarioConfig,
    tau_a: float,
    tau_b: float,
    beta_eff: float,
    jx: float,
    effective_duty: float,
) -> tuple[float, float | None]:
    plan = config.schedule
    if plan.n_ph_a is not None:
        flux_a = plan.n_ph_a / tau_a
    elif plan.kappa_tilde_sq_a is not None:
        flux_a = flux_for_kappa_tilde_sq(
            plan.kappa_tilde_sq_a, beta_eff, jx, tau_a, effective_duty
        )
    else:
        flux_a = config.params.flux_bar

    if plan.n_ph_b is not None:
        if tau_b <= 0.0:
            raise ConfigError("n_ph_b needs n_cycles_b >= 1", key="n_ph_b")
        return flux_a, plan.n_ph_b / tau_b
    return flux_a, plan.flux_bar_b


def prepare_point(
    config: ScenarioConfig,
    seed: int,
    settings: StrobeConfig | None = None,
    keep_cycles: bool = False,
) -> PointSetup:
    """Resolve a scenario into the schedule, couplings and shot-noise levels.

    Args:
        config: Scenario with any sweep override already applied.
        seed: Point seed, also used for Monte-Carlo shot noise.
        settings: Runtime settings; defaults to StrobeConfig().
        keep_cycles: Retain per-cycle values for a record dump.
    """
    settings = settings or StrobeConfig()
    params = config.params
    plan = config.schedule
    transition = params.transition()
    ensemble = params.ensemble()
    cavity = params.cavity() if config.cavity else None

    def schedule_for(
        flux_a: float, flux_b: float | None, optical_depth: float
    ) -> PulseSchedule:
        return PulseSchedule.from_cycles(
            2.0 * math.pi * plan.omega_hz,
            plan.duty,
            plan.n_cycles_a,
            flux_a,
            n_cycles_b=plan.n_cycles_b,
            gap_cycles=plan.gap_cycles,
            steps_per_period=plan.steps_per_period or settings.steps_per_period,
            flux_bar_b=flux_b,
            tensor_enabled=plan.tensor_enabled,
            depump_rate=plan.depump_rate,
            zeta=plan.zeta,
            optical_depth=optical_depth,
            detection=plan.detection,
        )

    def coupling_at(flux: float, duration: float, duty: float) -> CouplingSet:
        coupling = coupling_set(
            transition,
            ensemble,
            params.probe(duration=duration, flux_bar=flux),
            duty,
            settings.pole_guard_linewidths,
        )
        return coupling if cavity is None else cavity_enhance(coupling, cavity)

    probe_schedule = schedule_for(params.flux_bar, None, plan.d_eff)
    duty = probe_schedule.effective_duty
    nominal = coupling_at(params.flux_bar, probe_schedule.tau_a, duty)
    beta_eff = nominal.beta_eff
    flux_a, flux_b = _pulse_fluxes(
        config, probe_schedule.tau_a, probe_schedule.tau_b, beta_eff, ensemble.jx, duty
    )
    # The decoherence noise of the engine scales with the enhanced coupling.
    optical_depth = plan.d_eff
    if cavity is not None:
        optical_depth *= nominal.enhancement**2 / output_power_factor(cavity.t_out)
    schedule = schedule_for(flux_a, flux_b, optical_depth)
    schedule.check_grid()
    coupling = coupling_at(schedule.flux_bar, schedule.tau_a, duty)
    coupling_b = coupling
    if schedule.n_cycles_b and schedule.flux_b != schedule.flux_bar:
        coupling_b = coupling_at(schedule.flux_b, schedule.tau_b, duty)

    kind = config.init.kind
    if config.protocol == "thermal_calibration" and kind != "unpolarized_thermal":
        logger.info("thermal_calibration prepares an unpolarized ensemble")
        kind = "unpolarized_thermal"
    init = init_state(kind, ensemble, config.init.n_bar)
    mode_a = plan.mode_a.resolve(ensemble.gamma_dark)
    mode_b = plan.mode_b.resolve(ensemble.gamma_dark)

    if settings.psn_mode == "mc":
        psn_a = shot_noise_reference(schedule, coupling, config.n_traj, seed, mode_a)
        psn_b = (
            shot_noise_reference(
                schedule, coupling, config.n_traj, seed, mode_b, pulse="b"
            )
            if schedule.n_cycles_b
            else 0.0
        )
    else:
        psn_a = shot_noise_variance(schedule, mode_a, "a")
        psn_b = shot_noise_variance(schedule, mode_b, "b")

    setup = PointSetup(
        ensemble=ensemble,
        schedule=schedule,
        coupling=coupling,
        coupling_b=coupling_b,
        init=init,
        mode_a=mode_a,
        mode_b=mode_b,
        profile=strobe_profile(duty),
        kappa_tilde_sq_a=kappa_tilde_sq_for(schedule, coupling, ensemble.jx, "a"),
        kappa_tilde_sq_b=kappa_tilde_sq_for(schedule, coupling, ensemble.jx, "b"),
        psn_a=psn_a,
        psn_b=psn_b,
        d_eff=plan.d_eff,
        cavity=cavity,
        keep_cycles=keep_cycles,
    )
    logger.debug(
        "prepare_point kappa_tilde_sq_a=%.6g flux_a=%.6g psn_a=%.6g",
        setup.kappa_tilde_sq_a,
        flux_a,
        psn_a,
    )
    return setup


def _run(
    setup: PointSetup,
    config: ScenarioConfig,
    seed: int,
    settings: StrobeConfig,
) -> TwoPulseRun:
    return run_two_pulse(
        setup.schedule,
        setup.coupling,
        setup.ensemble,
        setup.init,
        setup.mode_a,
        setup.mode_b,
        config.n_traj,
        seed,
        jobs=settings.jobs,
        block_size=settings.block_size,
        keep_cycles=setup.keep_cycles,
    )


def _interval(
    metric: str,
    records: RecordEnsemble,
    seed: int,
    settings: StrobeConfig,
    ground_ref: float = 1.0,
) -> tuple[float, float]:
    return bootstrap_ci(
        metric,
        records,
        n_resamples=settings.bootstrap_resamples,
        seed=seed + settings.bootstrap_seed_offset,
        ground_ref=ground_ref,
        jobs=settings.jobs,
    )


def single_pulse_prediction(setup: PointSetup) -> float:
    """Record noise of pulse A above shot noise.

    The readout gain follows the reference spin and the back-action kick
    the actual J_x; for a polarized ensemble this is predict_oscillator_noise.
    """
    schedule = setup.schedule
    k_read = kappa_tilde_sq_for(schedule, setup.coupling, setup.init.jx_ref, "a")
    k_ba = kappa_tilde_sq_for(schedule, setup.coupling, setup.init.jx, "a")
    var_in = 2.0 * float(setup.init.cov[0, 0])
    return k_read * var_in + setup.profile.c * k_ba**2 / 3.0


def _single_pulse_noise(
    setup: PointSetup, config: ScenarioConfig, seed: int, settings: StrobeConfig
) -> ProtocolResult:
    run = _run(setup, config, seed, settings)
    records = RecordEnsemble(
        qa=run.qa, qb=run.qa, psn_a=setup.psn_a, psn_b=setup.psn_a, f_d=run.f_d
    )
    measured = oscillator_noise(float(np.var(run.qa, ddof=1)), setup.psn_a)
    lo, hi = _interval("var_xm_a", records, seed, settings)
    return ProtocolResult(
        analytic={
            "var": single_pulse_prediction(setup),
            "kappa_tilde_sq": setup.kappa_tilde_sq_a,
        },
        empirical={"var": measured, "ci_lo": lo, "ci_hi": hi},
        run=run,
    )


def _back_action_sweep(
    setup: PointSetup, config: ScenarioConfig, seed: int, settings: StrobeConfig
) -> ProtocolResult:
    k = setup.kappa_tilde_sq_a
    if k <= 0.0:
        raise DomainError("back_action_sweep needs a non-zero probe coupling")
    result = _single_pulse_noise(setup, config, seed, settings)
    empirical = result.empirical
    return result.model_copy(
        update={
            "analytic": {**result.analytic, "var": result.analytic["var"] / k},
            "empirical": {key: empirical[key] / k for key in ("var", "ci_lo", "ci_hi")},
        }
    )


def squeezing_prediction(setup: PointSetup) -> SqueezingPrediction:
    """Coherent conditional squeezing of pulse A plus its decoherence penalty."""
    k = setup.kappa_tilde_sq_a
    xi0_sq = conditional_squeezing(math.sqrt(k), setup.profile)
    bare = k / setup.coupling.enhancement**2
    return total_squeezing(
        xi0_sq,
        setup.schedule.zeta,
        math.sqrt(bare),
        setup.d_eff,
        setup.cavity,
    )


def _reference_noise(
    setup: PointSetup,
    config: ScenarioConfig,
    seed: int,
    settings: StrobeConfig,
    pulse: Literal["a", "b"],
) -> float:
    # One pulse alone on the coherent spin state.
    s = setup.schedule
    tau = s.tau_a if pulse == "a" else s.tau_b
    flux = s.flux_bar if pulse == "a" else s.flux_b
    mode = setup.mode_a if pulse == "a" else setup.mode_b
    schedule = s.model_copy(
        update={
            "tau_a": tau,
            "tau_b": 0.0,
            "gap": 0.0,
            "flux_bar": flux,
            "flux_bar_b": None,
        }
    )
    coupling = setup.coupling if pulse == "a" else setup.coupling_b
    run = run_two_pulse(
        schedule,
        coupling,
        setup.ensemble,
        init_state("ground", setup.ensemble),
        mode,
        mode,
        config.n_traj,
        derived_seed(seed, _REFERENCE_KEYS[pulse]),
        jobs=settings.jobs,
        block_size=settings.block_size,
    )
    psn = setup.psn_a if pulse == "a" else setup.psn_b
    return oscillator_noise(float(np.var(run.qa, ddof=1)), psn)


def ground_references(
    setup: PointSetup, config: ScenarioConfig, seed: int, settings: StrobeConfig
) -> tuple[float, float]:
    """Coherent-state oscillator noise seen by pulses B and A."""
    if config.ground_ref_mode == "mc":
        return (
            _reference_noise(setup, config, seed, settings, "b"),
            _reference_noise(setup, config, seed, settings, "a"),
        )
    for mode in (setup.mode_a, setup.mode_b):
        if mode.kind != "flat" and mode.rate > 0.0:
            logger.warning(
                "analytic ground reference assumes flat modes, got %s; "
                "set ground_ref_mode to mc",
                mode.kind,
            )
            break
    return (
        predict_oscillator_noise(math.sqrt(setup.kappa_tilde_sq_b), setup.profile),
        predict_oscillator_noise(math.sqrt(setup.kappa_tilde_sq_a), setup.profile),
    )


def _two_pulse_squeezing(
    setup: PointSetup, config: ScenarioConfig, seed: int, settings: StrobeConfig
) -> ProtocolResult:
    if setup.schedule.n_cycles_b < 1:
        raise ConfigError(
            "two_pulse_squeezing needs n_cycles_b >= 1", key="schedule.n_cycles_b"
        )
    run = _run(setup, config, seed, settings)
    records = RecordEnsemble.from_run(run, setup.psn_a, setup.psn_b)
    ground_ref, ground_ref_a = ground_references(setup, config, seed, settings)
    report = squeezing_report(records, ground_ref, ground_ref_a)
    lo, hi = _interval("xi_tilde_sq", records, seed, settings, ground_ref)
    report = report.model_copy(update={"ci_lo_db": to_db(lo), "ci_hi_db": to_db(hi)})
    prediction = squeezing_prediction(setup)
    return ProtocolResult(
        analytic={
            "var": prediction.xi_sq,
            "xi0_sq": prediction.xi0_sq,
            "eta_tau": prediction.eta_tau,
            "xi_db": prediction.xi_sq_db,
            "kappa_tilde_sq_a": setup.kappa_tilde_sq_a,
            "kappa_tilde_sq_b": setup.kappa_tilde_sq_b,
            "ground_ref": ground_ref,
        },
        empirical={
            "var": report.xi_tilde_sq,
            "ci_lo": lo,
            "ci_hi": hi,
            "xi_tilde_db": report.xi_tilde_sq_db,
            "xi_w_db": report.xi_w_sq_db,
            "n_bar": report.n_bar,
            "f_d": report.f_d,
        },
        report=report,
        run=run,
    )


def _signed_rate(mode: ModeFunction) -> float:
    if mode.kind == "exp_rising":
        return mode.rate
    if mode.kind == "exp_falling":
        return -mode.rate
    return 0.0


def _thermal_calibration(
    setup: PointSetup, config: ScenarioConfig, seed: int, settings: StrobeConfig
) -> ProtocolResult:
    result = _single_pulse_noise(setup, config, seed, settings)
    schedule = setup.schedule
    args = (
        setup.coupling.beta_eff,
        schedule.flux_bar,
        schedule.tau_a,
    )
    decay = (setup.ensemble.gamma_dark, _signed_rate(setup.mode_a), setup.profile)
    jz_var = thermal_jz_variance(setup.ensemble.n_at, setup.ensemble.F)
    predicted = thermal_signal_ratio(*args, jz_var, *decay) - 1.0
    measured = result.empirical["var"]
    jz_estimate = jz_variance_from_ratio(measured + 1.0, *args, *decay)
    logger.info(
        "thermal calibration <J_z^2> estimated=%.6g expected=%.6g",
        jz_estimate,
        jz_var,
    )
    return result.model_copy(
        update={
            "analytic": {"var": predicted, "jz_var": jz_var},
            "empirical": {**result.empirical, "jz_var": jz_estimate},
        }
    )


PROTOCOL_REGISTRY: dict[str, Protocol] = {
    "single_pulse_noise": _single_pulse_noise,
    "back_action_sweep": _back_action_sweep,
    "two_pulse_squeezing": _two_pulse_squeezing,
    "thermal_calibration": _thermal_calibration,
}


def cavity_terms(cavity: CavityConfig) -> dict[str, float]:
    """Resonant transmission and intracavity absorption of the probe cavity."""
    return {
        "cavity_transmission": resonant_transmission(cavity),
        "cavity_absorption": enhanced_absorption(cavity),
    }


def get_protocol(name: str) -> Protocol:
    """Resolve a protocol by name."""
    if name not in PROTOCOL_REGISTRY:
        raise ValueError(
            f"Unknown protocol {name!r}. Available: {list(PROTOCOL_REGISTRY)}"
        )
    return PROTOCOL_REGISTRY[name]


def run_protocol(
    config: ScenarioConfig,
    seed: int,
    settings: StrobeConfig | None = None,
    keep_cycles: bool = False,
) -> ProtocolResult:
    """Prepare a sweep point and run the scenario's protocol on it."""
    settings = settings or StrobeConfig()
    setup = prepare_point(config, seed, settings, keep_cycles)
    result = get_protocol(config.protocol)(setup, config, seed, settings)
    if setup.cavity is None:
        return result
    analytic = {**result.analytic, **cavity_terms(setup.cavity)}
    return result.model_copy(update={"analytic": analytic})

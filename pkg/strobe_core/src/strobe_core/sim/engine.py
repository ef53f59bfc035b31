"""Gaussian trajectory engine for stroboscopic probing.

The oscillator is integrated in the frame rotating at the Larmor frequency,
z = (X0, P0) with lab X = cos(Omega t) X0 + sin(Omega t) P0. Within a step
the probe kicks P (back-action) and, with tensor dynamics on, X; dark and
tensor relaxation act as a scalar damping. Because the damping is the same
for both components the recursion z_{j+1} = a_j z_j + u_j is solved in
closed form with cumulative products and sums over the whole pulse.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Literal, NamedTuple

import numpy as np

from strobe_core.analytics.strobe import strobe_profile
from strobe_core.config import StrobeConfig
from strobe_core.errors import NumericalError
from strobe_core.physics.models import CouplingSet, EnsembleConfig
from strobe_core.sim.models import (
    HEISENBERG_TOLERANCE,
    ModeFunction,
    OscillatorState,
    PulseSchedule,
    TrajectoryRecord,
    TwoPulseRun,
)
from strobe_core.sim.rng import SHOT_NOISE_STREAM, TRAJECTORY_STREAM, stream_generator

logger = logging.getLogger(__name__)

# Cumulative damping outside this range loses too much precision.
_DAMPING_RANGE = (1e-150, 1e150)


class _PulseGrid(NamedTuple):
    cos: np.ndarray
    sin: np.ndarray
    sigma: np.ndarray
    g_read_dt: np.ndarray
    g_ba: np.ndarray
    g_ts: np.ndarray
    damping: np.ndarray
    langevin_sd: np.ndarray
    weights: np.ndarray
    n_cycles: int
    f_end: float
    lit_time: float


def illumination_mask(schedule: PulseSchedule) -> np.ndarray:
    """Boolean mask of the illuminated steps within one period."""
    m = schedule.steps_per_period
    n_q = schedule.window_half_steps
    idx = np.arange(m)
    half = m // 2
    return (idx < n_q) | ((idx >= half - n_q) & (idx < half + n_q)) | (idx >= m - n_q)


def _pulse_grid(
    schedule: PulseSchedule,
    coupling: CouplingSet,
    state: OscillatorState,
    n_cycles: int,
    flux_bar: float,
    mode: ModeFunction,
    t_start: float,
    lit_before: float,
    gamma_dark: float,
    t1: float,
) -> _PulseGrid:
    m = schedule.steps_per_period
    dt = schedule.dt
    d_eff = schedule.effective_duty
    n_steps = n_cycles * m
    tau = n_cycles * schedule.period

    t_local = (np.arange(n_steps) + 0.5) * dt
    phase = schedule.omega * t_local
    cos, sin = np.cos(phase), np.sin(phase)
    lit = np.tile(illumination_mask(schedule), n_cycles)
    lit_f = lit.astype(float)
    flux = lit_f * flux_bar / d_eff

    lit_time = lit_before + dt * (np.cumsum(lit_f) - 0.5 * lit_f)
    inv_t1 = 0.0 if math.isinf(t1) else 1.0 / t1
    log_f = -(t_start + t_local) * inv_t1 - schedule.depump_rate * lit_time
    f = np.exp(log_f)

    beta = coupling.beta_eff
    sigma = np.sqrt(flux * dt / 4.0)
    g_read_dt = beta * (flux / 2.0) * np.sqrt(state.jx_ref * f) * dt
    g_ba = beta * state.jx * np.sqrt(f) / math.sqrt(state.jx_ref)
    g_ts = coupling.w * g_ba if schedule.tensor_enabled else np.zeros(n_steps)

    rate = np.full(n_steps, gamma_dark)
    if schedule.tensor_enabled and state.jx > 0.0 and schedule.flux_bar > 0.0:
        # coupling.gamma_sw is evaluated at schedule.flux_bar
        gamma_sw = coupling.gamma_sw * coupling.enhancement**2
        rate = rate + lit_f * gamma_sw * (flux_bar / schedule.flux_bar) / d_eff
    damping = np.exp(-rate * dt)

    langevin = state.bath_var * -np.expm1(-2.0 * gamma_dark * dt) * np.ones(n_steps)
    if schedule.zeta > 0.0:
        b = strobe_profile(d_eff).b
        probe_rate = (
            schedule.zeta
            / schedule.optical_depth
            * 0.25
            * beta**2
            * state.jx
            * f
            * flux_bar
            * b
            / d_eff
        )
        langevin = langevin + lit_f * probe_rate * dt / 2.0

    weights = mode.weights(t_local, tau) * lit_f
    total_lit = float(lit_f.sum()) * dt
    f_end = math.exp(
        -(t_start + tau) * inv_t1 - schedule.depump_rate * (lit_before + total_lit)
    )
    return _PulseGrid(
        cos=cos,
        sin=sin,
        sigma=sigma,
        g_read_dt=g_read_dt,
        g_ba=g_ba,
        g_ts=g_ts,
        damping=damping,
        langevin_sd=np.sqrt(langevin),
        weights=weights,
        n_cycles=n_cycles,
        f_end=f_end,
        lit_time=total_lit,
    )


def _cumulative_damping(damping: np.ndarray) -> np.ndarray:
    cumulative = np.concatenate(([1.0], np.cumprod(damping)))
    lo, hi = _DAMPING_RANGE
    finite = np.all(np.isfinite(cumulative))
    if not finite or cumulative.min() < lo or cumulative.max() > hi:
        raise NumericalError(
            "cumulative damping over the pulse leaves the representable range; "
            "shorten the pulse or reduce the relaxation rates"
        )
    return cumulative


def _integrate(
    grid: _PulseGrid,
    z0: np.ndarray,
    noise: np.ndarray,
    efficiency: float,
    electronic_noise: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Propagate a block of trajectories through one pulse.

    Args:
        grid: Per-step coefficients.
        z0: Rotating-frame quadratures at the pulse start, shape (n, 2).
        noise: Standard normals, shape (n, steps, 5): S_y, S_z, Langevin X,
            Langevin P, detector.

    Returns:
        (z_end, records) with records of shape (n, steps).
    """
    d_wy = noise[..., 0] * grid.sigma
    d_wz = noise[..., 1] * grid.sigma
    kick_p = grid.g_ba * d_wz
    kick_x = grid.g_ts * d_wy
    u0 = -grid.sin * kick_p + grid.cos * kick_x + grid.langevin_sd * noise[..., 2]
    u1 = grid.cos * kick_p + grid.sin * kick_x + grid.langevin_sd * noise[..., 3]

    cumulative = _cumulative_damping(grid.damping)
    inc0 = u0 / cumulative[1:]
    inc1 = u1 / cumulative[1:]
    acc0 = np.cumsum(inc0, axis=1)
    acc1 = np.cumsum(inc1, axis=1)
    x0 = cumulative[:-1] * (z0[:, :1] + acc0 - inc0)
    p0 = cumulative[:-1] * (z0[:, 1:] + acc1 - inc1)
    x_lab = grid.cos * x0 + grid.sin * p0

    records = math.sqrt(efficiency) * (d_wy + grid.g_read_dt * x_lab)
    extra = 1.0 - efficiency + electronic_noise
    if extra > 0.0:
        records = records + math.sqrt(extra) * grid.sigma * noise[..., 4]

    z_end = cumulative[-1] * (z0 + np.column_stack((acc0[:, -1], acc1[:, -1])))
    return z_end, records


def _propagate_covariance(
    grid: _PulseGrid, cov0: np.ndarray
) -> tuple[np.ndarray, float]:
    """Ensemble covariance after the pulse and the smallest det(cov) on the way."""
    var_w = grid.sigma**2
    ba = grid.g_ba**2 * var_w
    ts = grid.g_ts**2 * var_w
    q = grid.langevin_sd**2
    kxx = ba * grid.sin**2 + ts * grid.cos**2 + q
    kxp = (ts - ba) * grid.sin * grid.cos
    kpp = ba * grid.cos**2 + ts * grid.sin**2 + q

    cumulative = _cumulative_damping(grid.damping)
    scale = cumulative**2
    cxx = scale * (cov0[0, 0] + np.concatenate(([0.0], np.cumsum(kxx / scale[1:]))))
    cxp = scale * (cov0[0, 1] + np.concatenate(([0.0], np.cumsum(kxp / scale[1:]))))
    cpp = scale * (cov0[1, 1] + np.concatenate(([0.0], np.cumsum(kpp / scale[1:]))))
    det = cxx * cpp - cxp**2
    cov_end = np.array([[cxx[-1], cxp[-1]], [cxp[-1], cpp[-1]]])
    return cov_end, float(det.min())


def _check_uncertainty(min_det: float) -> None:
    if min_det < 0.25 - HEISENBERG_TOLERANCE:
        raise NumericalError(
            f"ensemble covariance falls below the uncertainty bound: "
            f"min det={min_det:.6g} < 1/4"
        )


def _gap(gamma_dark: float, gap: float, bath_var: float) -> tuple[float, float]:
    damping = math.exp(-gamma_dark * gap)
    return damping, bath_var * -math.expm1(-2.0 * gamma_dark * gap)


def _sample_factor(cov: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(cov)
    return vectors * np.sqrt(np.clip(values, 0.0, None))


def _demodulate(grid: _PulseGrid, records: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = records @ (grid.cos * grid.weights)
    n = records.shape[0]
    y_cos = (records * grid.cos).reshape(n, grid.n_cycles, -1).sum(axis=2)
    y_sin = (records * grid.sin).reshape(n, grid.n_cycles, -1).sum(axis=2)
    return q, np.stack((y_cos, y_sin), axis=-1)


class _Plan(NamedTuple):
    grid_a: _PulseGrid
    grid_b: _PulseGrid | None
    gap_damping: float
    gap_var: float
    init_factor: np.ndarray
    init_mean: np.ndarray


def _run_block(
    plan: _Plan,
    schedule: PulseSchedule,
    indices: range,
    base_seed: int,
    stream: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    steps_a = plan.grid_a.cos.size
    steps_b = 0 if plan.grid_b is None else plan.grid_b.cos.size
    init = np.empty((len(indices), 2))
    noise_a = np.empty((len(indices), steps_a, 5))
    gap = np.empty((len(indices), 2))
    noise_b = np.empty((len(indices), steps_b, 5))
    for row, index in enumerate(indices):
        rng = stream_generator(base_seed, stream, index)
        init[row] = rng.standard_normal(2)
        noise_a[row] = rng.standard_normal((steps_a, 5))
        gap[row] = rng.standard_normal(2)
        if steps_b:
            noise_b[row] = rng.standard_normal((steps_b, 5))

    detection = schedule.detection
    z0 = plan.init_mean + init @ plan.init_factor.T
    z_a, rec_a = _integrate(
        plan.grid_a, z0, noise_a, detection.efficiency, detection.electronic_noise
    )
    q_a, cycles_a = _demodulate(plan.grid_a, rec_a)
    x_after_a = z_a[:, 0].copy()

    if plan.grid_b is None:
        q_b = np.zeros(len(indices))
        cycles = cycles_a
    else:
        z_gap = plan.gap_damping * z_a + math.sqrt(plan.gap_var) * gap
        _, rec_b = _integrate(
            plan.grid_b,
            z_gap,
            noise_b,
            detection.efficiency,
            detection.electronic_noise,
        )
        q_b, cycles_b = _demodulate(plan.grid_b, rec_b)
        cycles = np.concatenate((cycles_a, cycles_b), axis=1)

    if not (np.all(np.isfinite(q_a)) and np.all(np.isfinite(q_b))):
        raise NumericalError("non-finite lock-in output")
    return q_a, q_b, cycles, x_after_a


def _blocks(n_traj: int, block_size: int) -> list[range]:
    starts = range(0, n_traj, block_size)
    return [range(lo, min(lo + block_size, n_traj)) for lo in starts]


def _simulate(
    schedule: PulseSchedule,
    coupling: CouplingSet,
    init: OscillatorState,
    mode_a: ModeFunction,
    mode_b: ModeFunction,
    n_traj: int,
    base_seed: int,
    stream: int,
    gamma_dark: float,
    t1: float,
    jobs: int | None,
    block_size: int | None,
    keep_cycles: bool,
) -> TwoPulseRun:
    schedule.check_grid()
    if n_traj < 1:
        raise ValueError(f"n_traj must be positive, got {n_traj}")
    settings = StrobeConfig()
    jobs = jobs or settings.jobs
    block_size = block_size or settings.block_size

    grid_a = _pulse_grid(
        schedule, coupling, init, schedule.n_cycles_a, schedule.flux_bar, mode_a,
        t_start=0.0, lit_before=0.0, gamma_dark=gamma_dark, t1=t1,
    )
    cov_a, min_det = _propagate_covariance(grid_a, init.cov)
    gap_time = schedule.gap_cycles * schedule.period
    gap_damping, gap_var = _gap(gamma_dark, gap_time, init.bath_var)

    grid_b = None
    if schedule.n_cycles_b > 0:
        grid_b = _pulse_grid(
            schedule, coupling, init, schedule.n_cycles_b, schedule.flux_b, mode_b,
            t_start=schedule.n_cycles_a * schedule.period + gap_time,
            lit_before=grid_a.lit_time, gamma_dark=gamma_dark, t1=t1,
        )
        cov_gap = gap_damping**2 * cov_a + gap_var * np.eye(2)
        _, min_det_b = _propagate_covariance(grid_b, cov_gap)
        min_det = min(min_det, min_det_b)

    _check_uncertainty(min_det)

    plan = _Plan(
        grid_a=grid_a,
        grid_b=grid_b,
        gap_damping=gap_damping,
        gap_var=gap_var,
        init_factor=_sample_factor(init.cov),
        init_mean=init.mean,
    )
    blocks = _blocks(n_traj, block_size)
    logger.debug(
        "simulate n_traj=%d blocks=%d jobs=%d steps=%d d_eff=%.4g",
        n_traj,
        len(blocks),
        jobs,
        grid_a.cos.size + (0 if grid_b is None else grid_b.cos.size),
        schedule.effective_duty,
    )
    if jobs > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(
                    lambda block: _run_block(plan, schedule, block, base_seed, stream),
                    blocks,
                )
            )
    else:
        results = [
            _run_block(plan, schedule, block, base_seed, stream) for block in blocks
        ]

    records: list[TrajectoryRecord] = []
    x_after = []
    for block, (q_a, q_b, cycles, x_a) in zip(blocks, results):
        x_after.append(x_a)
        for row, index in enumerate(block):
            records.append(
                TrajectoryRecord(
                    q_a=float(q_a[row]),
                    q_b=float(q_b[row]),
                    per_cycle=cycles[row] if keep_cycles else None,
                    seed=(base_seed, index),
                )
            )

    f_d = grid_a.f_end
    state_after_a = OscillatorState(
        mean=grid_a.damping.prod() * init.mean,
        cov=0.5 * (cov_a + cov_a.T),
        jx=init.jx * f_d,
        time=schedule.n_cycles_a * schedule.period,
        jx_ref=init.jx_ref * f_d,
        bath_var=init.bath_var,
    )
    return TwoPulseRun(
        schedule=schedule,
        mode_a=mode_a,
        mode_b=mode_b,
        records=records,
        f_d=f_d,
        min_cov_det=min_det,
        state_after_a=state_after_a,
        x_after_a=np.concatenate(x_after),
    )


def run_two_pulse(
    schedule: PulseSchedule,
    coupling: CouplingSet,
    ensemble: EnsembleConfig,
    init: OscillatorState,
    mode_a: ModeFunction,
    mode_b: ModeFunction,
    n_traj: int,
    base_seed: int,
    *,
    jobs: int | None = None,
    block_size: int | None = None,
    keep_cycles: bool = False,
) -> TwoPulseRun:
    """Simulate independent trajectories of the two-pulse protocol.

    Pulse A is demodulated with mode_a, then after ``gap`` the second pulse
    with mode_b. The coupling must be evaluated at ``schedule.flux_bar``;
    pulse B rescales flux-dependent terms to ``schedule.flux_b``.

    Args:
        schedule: Time grid and pulses.
        coupling: Light-atom coupling; ``beta_eff`` is integrated.
        ensemble: Supplies the dark relaxation rate and T_1.
        init: Initial state, e.g. from init_state.
        mode_a: Lock-in mode of pulse A (rising for the squeezing protocol).
        mode_b: Lock-in mode of pulse B (falling for the squeezing protocol).
        n_traj: Number of trajectories.
        base_seed: Seed; trajectory i uses the stream (base_seed, i).
        jobs: Worker threads; defaults to StrobeConfig().jobs.
        block_size: Trajectories per vectorized block.
        keep_cycles: Retain the per-period (Y_cos, Y_sin) values.

    Returns:
        Records ordered by trajectory index, plus f_d and the ensemble state
        after pulse A.

    Raises:
        GridError: If the schedule does not fit the time grid.
        NumericalError: If the integration leaves the representable range or
            the ensemble covariance breaks det(cov) >= 1/4.
    """
    run = _simulate(
        schedule,
        coupling,
        init,
        mode_a,
        mode_b,
        n_traj,
        base_seed,
        TRAJECTORY_STREAM,
        ensemble.gamma_dark,
        ensemble.t1,
        jobs,
        block_size,
        keep_cycles,
    )
    logger.debug(
        "run_two_pulse n_traj=%d f_d=%.6g min_det=%.6g",
        n_traj,
        run.f_d,
        run.min_cov_det,
    )
    return run


def step_period(
    state: OscillatorState,
    schedule: PulseSchedule,
    coupling: CouplingSet,
    rng: np.random.Generator,
    ensemble: EnsembleConfig | None = None,
) -> tuple[OscillatorState, float, float]:
    """Advance one trajectory by one Larmor period.

    The state's mean is taken as the trajectory's current sample at a period
    boundary; its covariance is propagated as the ensemble covariance.

    Returns:
        (new_state, Y_cos, Y_sin) for the period.
    """
    schedule.check_grid()
    gamma_dark = 0.0 if ensemble is None else ensemble.gamma_dark
    t1 = math.inf if ensemble is None else ensemble.t1
    grid = _pulse_grid(
        schedule,
        coupling,
        state,
        1,
        schedule.flux_bar,
        ModeFunction(),
        t_start=0.0,
        lit_before=0.0,
        gamma_dark=gamma_dark,
        t1=t1,
    )
    noise = rng.standard_normal((1, schedule.steps_per_period, 5))
    z_end, records = _integrate(
        grid,
        state.mean[None, :],
        noise,
        schedule.detection.efficiency,
        schedule.detection.electronic_noise,
    )
    cov, min_det = _propagate_covariance(grid, state.cov)
    _check_uncertainty(min_det)
    y_cos = float(records[0] @ grid.cos)
    y_sin = float(records[0] @ grid.sin)
    new_state = state.model_copy(
        update={
            "mean": z_end[0],
            "cov": 0.5 * (cov + cov.T),
            "jx": state.jx * grid.f_end,
            "jx_ref": state.jx_ref * grid.f_end,
            "time": state.time + schedule.period,
        }
    )
    return new_state, y_cos, y_sin


def shot_noise_variance(
    schedule: PulseSchedule, mode: ModeFunction, pulse: Literal["a", "b"] = "a"
) -> float:
    """Exact variance of a pulse's lock-in output with the atoms decoupled."""
    schedule.check_grid()
    n_cycles = schedule.n_cycles_a if pulse == "a" else schedule.n_cycles_b
    if n_cycles == 0:
        return 0.0
    flux_bar = schedule.flux_bar if pulse == "a" else schedule.flux_b
    m = schedule.steps_per_period
    dt = schedule.dt
    tau = n_cycles * schedule.period
    t_local = (np.arange(n_cycles * m) + 0.5) * dt
    lit = np.tile(illumination_mask(schedule), n_cycles).astype(float)
    flux = lit * flux_bar / schedule.effective_duty
    weights = mode.weights(t_local, tau) * np.cos(schedule.omega * t_local)
    total = float(np.sum(weights**2 * flux * dt / 4.0))
    return total * (1.0 + schedule.detection.electronic_noise)


def shot_noise_reference(
    schedule: PulseSchedule,
    coupling: CouplingSet,
    n_traj: int,
    base_seed: int,
    mode: ModeFunction | None = None,
    pulse: Literal["a", "b"] = "a",
) -> float:
    """Monte-Carlo shot-noise level: Var(q) with the light-atom coupling off."""
    decoupled = coupling.model_copy(
        update={"beta": 0.0, "kappa": 0.0, "kappa_tilde": 0.0, "gamma_sw": 0.0}
    )
    mode = mode or ModeFunction()
    probe_state = OscillatorState(
        mean=np.zeros(2), cov=0.5 * np.eye(2), jx=1.0, jx_ref=1.0
    )
    run = _simulate(
        schedule,
        decoupled,
        probe_state,
        mode,
        mode,
        n_traj,
        base_seed,
        SHOT_NOISE_STREAM,
        0.0,
        math.inf,
        None,
        None,
        False,
    )
    values = run.qa if pulse == "a" else run.qb
    return float(np.var(values, ddof=1))


def kappa_tilde_sq_for(
    schedule: PulseSchedule,
    coupling: CouplingSet,
    jx: float,
    pulse: Literal["a", "b"] = "a",
) -> float:
    """kappa_tilde^2 = beta_eff^2 J_x flux_bar tau b / 4 at the effective duty."""
    tau = schedule.tau_a if pulse == "a" else schedule.tau_b
    flux = schedule.flux_bar if pulse == "a" else schedule.flux_b
    b = strobe_profile(schedule.effective_duty).b
    return 0.25 * coupling.beta_eff**2 * jx * flux * tau * b


def flux_for_kappa_tilde_sq(
    kappa_tilde_sq: float, beta_eff: float, jx: float, tau: float, effective_duty: float
) -> float:
    """Period-averaged flux giving the requested kappa_tilde^2."""
    b = strobe_profile(effective_duty).b
    return 4.0 * kappa_tilde_sq / (beta_eff**2 * jx * tau * b)

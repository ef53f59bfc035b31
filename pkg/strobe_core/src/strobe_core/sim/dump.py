"""Binary dump of per-cycle lock-in records.

Layout: magic ``b"STRB1"``, ``<I`` version, ``<Q`` n_traj, ``<Q`` cycles, then
little-endian float64 values ordered trajectory x cycle x (Y_cos, Y_sin).
A JSON sidecar next to the dump carries what is needed to rebuild q_A and
q_B from the per-cycle values.
"""

import logging
import struct
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from strobe_core.errors import ConfigError
from strobe_core.sim.engine import illumination_mask
from strobe_core.sim.models import ModeFunction, PulseSchedule, TwoPulseRun

logger = logging.getLogger(__name__)

MAGIC = b"STRB1"
VERSION = 1
_HEADER = struct.Struct("<5sIQQ")


class DumpMetadata(BaseModel):
    """Sidecar contents of a record dump."""

    model_config = ConfigDict(frozen=True)

    schedule: PulseSchedule
    mode_a: ModeFunction
    mode_b: ModeFunction
    cycles_a: int = Field(ge=1)
    cycles_b: int = Field(ge=0)
    f_d: float = Field(gt=0.0, le=1.0)
    base_seed: int
    ground_ref: float | None = Field(default=None, gt=0.0)


def sidecar_path(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def write_dump(
    path: Path, run: TwoPulseRun, base_seed: int, ground_ref: float | None = None
) -> Path:
    """Write the per-cycle values of a run plus its sidecar.

    ``ground_ref`` is the coherent-state oscillator noise of pulse B, stored
    so that the report can evaluate the Wineland parameter.

    Raises:
        ValueError: If the run was simulated without per-cycle values.
    """
    per_cycle = run.per_cycle()
    if per_cycle is None:
        raise ValueError("run has no per-cycle values; simulate with keep_cycles=True")
    n_traj, cycles, _ = per_cycle.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, n_traj, cycles))
        f.write(np.ascontiguousarray(per_cycle, dtype="<f8").tobytes())

    metadata = DumpMetadata(
        schedule=run.schedule,
        mode_a=run.mode_a,
        mode_b=run.mode_b,
        cycles_a=run.schedule.n_cycles_a,
        cycles_b=run.schedule.n_cycles_b,
        f_d=run.f_d,
        base_seed=base_seed,
        ground_ref=ground_ref,
    )
    sidecar_path(path).write_text(metadata.model_dump_json(indent=2))
    logger.info("write_dump path=%s n_traj=%d cycles=%d", path, n_traj, cycles)
    return path


def read_dump(path: Path) -> tuple[np.ndarray, DumpMetadata]:
    """Read a dump and its sidecar.

    Returns:
        (per_cycle, metadata) with per_cycle of shape (n_traj, cycles, 2).

    Raises:
        ConfigError: If the file or sidecar is missing, malformed or empty.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"record dump not found: {path}", key="dump")
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise ConfigError(f"record dump {path} is empty or truncated", key="dump")
    magic, version, n_traj, cycles = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ConfigError(f"{path} is not a record dump (magic {magic!r})", key="dump")
    if version != VERSION:
        raise ConfigError(f"unsupported dump version {version}", key="dump")
    if n_traj == 0 or cycles == 0:
        raise ConfigError(f"record dump {path} holds no records", key="dump")
    expected = n_traj * cycles * 2 * 8
    payload = raw[_HEADER.size :]
    if len(payload) != expected:
        raise ConfigError(
            f"record dump {path} has {len(payload)} payload bytes, expected {expected}",
            key="dump",
        )
    per_cycle = np.frombuffer(payload, dtype="<f8").reshape(n_traj, cycles, 2)

    meta_path = sidecar_path(path)
    if not meta_path.exists():
        raise ConfigError(f"sidecar not found: {meta_path}", key="dump")
    try:
        metadata = DumpMetadata.model_validate_json(meta_path.read_text())
    except ValidationError as e:
        raise ConfigError(f"invalid sidecar {meta_path}: {e}", key="dump") from e
    if metadata.cycles_a + metadata.cycles_b != cycles:
        raise ConfigError(
            f"sidecar cycle split {metadata.cycles_a}+{metadata.cycles_b} does not "
            f"match {cycles} cycles in the dump",
            key="dump",
        )
    logger.debug("read_dump path=%s n_traj=%d cycles=%d", path, n_traj, cycles)
    return per_cycle, metadata


def _cycle_weights(
    schedule: PulseSchedule, mode: ModeFunction, cycles: int
) -> np.ndarray:
    centres = (np.arange(cycles) + 0.5) * schedule.period
    return mode.weights(centres, cycles * schedule.period)


def lockin_from_cycles(
    per_cycle: np.ndarray, metadata: DumpMetadata
) -> tuple[np.ndarray, np.ndarray]:
    """Rebuild q_A and q_B with mode weights evaluated at cycle centres."""
    split = metadata.cycles_a
    y_cos = per_cycle[..., 0]
    w_a = _cycle_weights(metadata.schedule, metadata.mode_a, split)
    qa = y_cos[:, :split] @ w_a
    if metadata.cycles_b == 0:
        return qa, np.zeros_like(qa)
    w_b = _cycle_weights(metadata.schedule, metadata.mode_b, metadata.cycles_b)
    return qa, y_cos[:, split:] @ w_b


def cycle_shot_noise_variance(metadata: DumpMetadata, pulse: str = "a") -> float:
    """Shot-noise variance matching lockin_from_cycles for one pulse."""
    schedule = metadata.schedule
    if pulse == "a":
        cycles, mode, flux_bar = metadata.cycles_a, metadata.mode_a, schedule.flux_bar
    else:
        cycles, mode, flux_bar = metadata.cycles_b, metadata.mode_b, schedule.flux_b
    if cycles == 0:
        return 0.0
    m = schedule.steps_per_period
    dt = schedule.dt
    phase = schedule.omega * (np.arange(m) + 0.5) * dt
    lit = illumination_mask(schedule)
    flux = lit * flux_bar / schedule.effective_duty
    per_period = float(np.sum(np.cos(phase) ** 2 * flux))
    per_period *= dt / 4.0 * (1.0 + schedule.detection.electronic_noise)
    weights = _cycle_weights(schedule, mode, cycles)
    return per_period * float(np.sum(weights**2))

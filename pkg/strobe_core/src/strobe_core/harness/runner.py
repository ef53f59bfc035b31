"""Sweep runner: one protocol per sweep point, rows written as they finish."""

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import pandas as pd
from pydantic import BaseModel, Field

from strobe_core.config import StrobeConfig
from strobe_core.errors import StrobeError
from strobe_core.harness.protocols import ProtocolResult, run_protocol
from strobe_core.harness.scenario import ScenarioConfig, apply_overrides
from strobe_core.sim.rng import derived_seed

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "sweep_value",
    "analytic_var",
    "mc_var",
    "mc_ci_lo",
    "mc_ci_hi",
    "xi_tilde_db",
    "xi_w_db",
    "runtime_s",
)

_NAN = float("nan")


class SweepRow(BaseModel):
    """One sweep point.

    ``analytic["var"]`` and ``empirical["var"]`` share units and
    normalization; ``error`` is set when the point failed.
    """

    sweep_value: float
    series: str | None = None
    analytic: dict[str, float] = Field(default_factory=dict)
    empirical: dict[str, float] = Field(default_factory=dict)
    runtime_s: float = 0.0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_record(self) -> dict[str, float]:
        """Flat record with the fixed output columns."""
        return {
            "sweep_value": self.sweep_value,
            "analytic_var": self.analytic.get("var", _NAN),
            "mc_var": self.empirical.get("var", _NAN),
            "mc_ci_lo": self.empirical.get("ci_lo", _NAN),
            "mc_ci_hi": self.empirical.get("ci_hi", _NAN),
            "xi_tilde_db": self.empirical.get("xi_tilde_db", _NAN),
            "xi_w_db": self.empirical.get("xi_w_db", _NAN),
            "runtime_s": self.runtime_s,
        }

    def __str__(self) -> str:
        if self.error:
            return f"SweepRow({self.sweep_value:.6g}: failed: {self.error})"
        return (
            f"SweepRow({self.sweep_value:.6g}: "
            f"analytic={self.analytic.get('var', _NAN):.6g}, "
            f"mc={self.empirical.get('var', _NAN):.6g} "
            f"[{self.empirical.get('ci_lo', _NAN):.6g}, "
            f"{self.empirical.get('ci_hi', _NAN):.6g}])"
        )


def rows_to_frame(rows: list[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([row.to_record() for row in rows], columns=list(CSV_COLUMNS))


def output_path(config: ScenarioConfig, series: str | None = None) -> Path:
    """``<outputs>/<name>[__<series>].<format>``."""
    stem = config.name if series is None else f"{config.name}__{series}"
    return Path(config.outputs) / f"{stem}.{config.format}"


class RowWriter:
    """Appends rows to a CSV file or atomically rewrites a JSON file.

    A fresh writer replaces any existing output.
    """

    def __init__(self, path: Path, fmt: str = "csv") -> None:
        self._path = Path(path)
        self._format = fmt
        self._rows: list[SweepRow] = []
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._path.unlink(missing_ok=True)

    @property
    def path(self) -> Path:
        return self._path

    def append(self, row: SweepRow) -> None:
        self._rows.append(row)
        if self._format == "csv":
            rows_to_frame([row]).to_csv(
                self._path,
                mode="a",
                header=len(self._rows) == 1,
                index=False,
                float_format="%.17g",
            )
            return
        tmp = self._path.with_name(self._path.name + ".tmp")
        rows_to_frame(self._rows).to_json(tmp, orient="records", double_precision=15)
        os.replace(tmp, self._path)


def read_rows(path: Path) -> pd.DataFrame:
    """Read a sweep output written by RowWriter."""
    path = Path(path)
    if path.suffix == ".json":
        return pd.read_json(path, orient="records", precise_float=True)
    return pd.read_csv(path, float_precision="round_trip")


def run_point(
    config: ScenarioConfig,
    value: float | None = None,
    index: int = 0,
    series_index: int = 0,
    settings: StrobeConfig | None = None,
    series: str | None = None,
    keep_cycles: bool = False,
    strict: bool = False,
) -> tuple[SweepRow, ProtocolResult | None]:
    """Run the protocol at one sweep point.

    A StrobeError becomes an error row unless ``strict`` is set; anything
    else propagates.

    Args:
        config: Scenario with any series overrides applied.
        value: Sweep value; None runs the scenario as configured.
        index: Point index, part of the point seed.
        series_index: Series index, part of the point seed.
        settings: Runtime settings; defaults to StrobeConfig().
        series: Series name recorded on the row.
        keep_cycles: Keep per-cycle values on the returned run for a dump.
        strict: Raise StrobeError instead of returning an error row.
    """
    settings = settings or StrobeConfig()
    seed = derived_seed(config.base_seed, series_index, index)
    sweep_value = _NAN if value is None else float(value)
    start = time.perf_counter()
    try:
        point = config
        if value is not None:
            point = apply_overrides(config, {config.sweep.variable: value})
        result = run_protocol(point, seed, settings, keep_cycles)
    except StrobeError as e:
        if strict:
            raise
        logger.warning(
            "sweep point %d (%s=%g) failed: %s",
            index,
            config.sweep.variable,
            sweep_value,
            e,
        )
        return SweepRow(sweep_value=sweep_value, series=series, error=str(e)), None
    runtime = time.perf_counter() - start if settings.record_runtime else 0.0
    row = SweepRow(
        sweep_value=sweep_value,
        series=series,
        analytic=result.analytic,
        empirical=result.empirical,
        runtime_s=runtime,
    )
    logger.debug("run_point index=%d %s", index, row)
    return row, result


def _series(config: ScenarioConfig) -> list[tuple[str | None, dict[str, Any]]]:
    if not config.series:
        return [(None, {})]
    return [
        (entry["name"], {k: v for k, v in entry.items() if k != "name"})
        for entry in config.series
    ]


def _run_parallel(
    config: ScenarioConfig,
    points: list[float],
    series_index: int,
    series: str | None,
    settings: StrobeConfig,
    jobs: int,
    writer: RowWriter,
) -> list[SweepRow]:
    # Each point writes its own part file; parts are merged in index order.
    part_dir = writer.path.with_name(writer.path.name + ".parts")
    part_dir.mkdir(parents=True, exist_ok=True)

    def one(index: int) -> SweepRow:
        row, _ = run_point(
            config, points[index], index, series_index, settings, series
        )
        part = RowWriter(part_dir / f"{index:06d}.{config.format}", config.format)
        part.append(row)
        return row

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        rows = list(pool.map(one, range(len(points))))
    for index, row in enumerate(rows):
        writer.append(row)
        (part_dir / f"{index:06d}.{config.format}").unlink(missing_ok=True)
    part_dir.rmdir()
    return rows


def run_scenario(
    config: ScenarioConfig,
    settings: StrobeConfig | None = None,
    jobs: int = 1,
) -> list[SweepRow]:
    """Run the scenario's protocol at every sweep point of every series.

    Rows are written to ``output_path`` as they finish, so an interrupted
    sweep keeps the points already done. Failed points are recorded and the
    sweep continues.

    Args:
        config: Validated scenario.
        settings: Runtime settings; defaults to StrobeConfig().
        jobs: Sweep points run concurrently; part files keep the output in
            index order.

    Raises:
        ConfigError: If a series override is invalid.
    """
    settings = settings or StrobeConfig()
    points = config.sweep.points()
    rows: list[SweepRow] = []
    for series_index, (series, overrides) in enumerate(_series(config)):
        series_config = apply_overrides(config, overrides) if overrides else config
        writer = RowWriter(output_path(config, series), config.format)
        logger.info(
            "sweep %s%s: %d points of %s -> %s",
            config.name,
            "" if series is None else f" [{series}]",
            len(points),
            config.sweep.variable,
            writer.path,
        )
        if jobs > 1:
            rows.extend(
                _run_parallel(
                    series_config, points, series_index, series, settings, jobs, writer
                )
            )
            continue
        for index, value in enumerate(points):
            row, _ = run_point(
                series_config, value, index, series_index, settings, series
            )
            writer.append(row)
            rows.append(row)
            logger.info("point %d/%d %s", index + 1, len(points), row)
    failed = sum(not row.ok for row in rows)
    if failed:
        logger.warning(
            "sweep %s: %d of %d points failed", config.name, failed, len(rows)
        )
    return rows


def fit_decoherence(rows: list[SweepRow], at: int) -> tuple[float, list[SweepRow]]:
    """Fit the effective decoherence slope from one point and re-predict the rest.

    The decoherence penalty is linear in kappa_tilde^2, so one measured point
    fixes ``zeta / d``: slope = (xi_measured - xi0_sq) / kappa_tilde_sq_a.

    Args:
        rows: two_pulse_squeezing rows carrying xi0_sq and kappa_tilde_sq_a.
        at: Index of the row used for the fit.

    Returns:
        (slope, rows with analytic var = xi0_sq + slope * kappa_tilde_sq_a).

    Raises:
        ValueError: If the chosen row failed or lacks the squeezing terms.
    """
    row = rows[at]
    if not row.ok or "xi0_sq" not in row.analytic:
        raise ValueError(f"row {at} has no two-pulse squeezing result")
    k = row.analytic["kappa_tilde_sq_a"]
    if k <= 0.0:
        raise ValueError(f"row {at} has no probe coupling")
    slope = (row.empirical["var"] - row.analytic["xi0_sq"]) / k
    refit = []
    for r in rows:
        if not r.ok or "xi0_sq" not in r.analytic:
            refit.append(r)
            continue
        eta = slope * r.analytic["kappa_tilde_sq_a"]
        analytic = {
            **r.analytic,
            "eta_tau": eta,
            "var": r.analytic["xi0_sq"] + eta,
        }
        refit.append(r.model_copy(update={"analytic": analytic}))
    logger.info("fit_decoherence at=%d slope=%.6g", at, slope)
    if not math.isfinite(slope):
        logger.warning("fit_decoherence slope is not finite")
    return slope, refit

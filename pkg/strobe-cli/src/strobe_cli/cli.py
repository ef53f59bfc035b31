"""CLI entry point for strobe.

Exit codes: 0 on success, 1 on configuration or input errors (including
usage errors), 2 on numerical failures and unresolvable time grids.
"""

import argparse
import json
import logging
import math
import sys
from importlib.resources import files
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from strobe_core.analytics import (
    conditional_squeezing,
    ground_state_x_variance,
    optimal_cavity_squeezing,
    predict_oscillator_noise,
    strobe_profile,
    total_squeezing,
)
from strobe_core.config import StrobeConfig
from strobe_core.errors import ConfigError, GridError, NumericalError, StrobeError
from strobe_core.estimation import (
    RecordEnsemble,
    bootstrap_ci,
    squeezing_report,
    to_db,
)
from strobe_core.harness import (
    RowWriter,
    ScenarioConfig,
    cavity_terms,
    load_scenario,
    output_path,
    run_point,
    run_scenario,
)
from strobe_core.physics import coupling_set, load_parameter_set
from strobe_core.physics.params import first_error_key
from strobe_core.sim import derived_seed, read_dump, write_dump
from strobe_cli.settings import CliConfig, get_cli_config
from strobe_cli.units import frequency_arg

logger = logging.getLogger("strobe_cli")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1)."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _print_table(title: str, rows: list[tuple[str, Any]]) -> None:
    print(title)
    for name, value in rows:
        text = f"{value:.6g}" if isinstance(value, float) else str(value)
        print(f"  {name:<20}{text}")


def bundled_scenarios() -> list[str]:
    """Names of the scenario files shipped with the CLI."""
    root = files("strobe_cli") / "templates" / "scenarios"
    return sorted(
        entry.name.removesuffix(".json")
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def resolve_scenario_path(name: str) -> Path:
    """A scenario file path, or the name of a bundled scenario."""
    path = Path(name)
    if path.exists():
        return path
    stem = path.name.removesuffix(".json")
    if path.parent == Path(".") and stem in bundled_scenarios():
        resource = files("strobe_cli") / "templates" / "scenarios" / f"{stem}.json"
        return Path(str(resource))
    raise ConfigError(
        f"scenario {name!r} not found. Bundled: {bundled_scenarios()}", key="config"
    )


def _scenario(args: argparse.Namespace) -> ScenarioConfig:
    """Load the scenario and apply --seed, --traj, --out and --format."""
    config = load_scenario(resolve_scenario_path(args.scenario))
    updates = {
        "base_seed": args.seed,
        "n_traj": args.traj,
        "outputs": args.out,
        "format": args.format,
    }
    updates = {k: v for k, v in updates.items() if v is not None}
    if not updates:
        return config
    try:
        return ScenarioConfig.model_validate(config.model_dump() | updates)
    except ValidationError as e:
        raise ConfigError(f"invalid option: {e}", key=first_error_key(e)) from e


def cmd_analytics(args: argparse.Namespace, cli_config: CliConfig) -> int:
    profile = strobe_profile(args.duty)
    k = args.kappa2
    xi0_sq = conditional_squeezing(math.sqrt(k), profile)
    _print_table(
        f"Duty cycle D = {args.duty:g}",
        [
            ("C", profile.c),
            ("B", profile.b),
            ("sinc(pi D)", profile.sinc_pd),
            ("ground Var(x)", ground_state_x_variance(profile)),
        ],
    )
    _print_table(
        f"Pulse with kappa_tilde^2 = {k:g}",
        [
            ("noise over PSN", predict_oscillator_noise(math.sqrt(k), profile)),
            ("back-action term", profile.c * k * k / 3.0),
            ("xi0^2", xi0_sq),
            ("xi0^2 (dB)", to_db(xi0_sq)),
        ],
    )

    params = load_parameter_set(args.params)
    if args.detuning is not None:
        detuning_hz = args.detuning / (2.0 * math.pi)
        params = params.model_copy(update={"detuning_hz": detuning_hz})
    cavity = params.cavity() if args.cavity else None
    if args.zeta > 0.0:
        enhancement = 2.0 * cavity.finesse / math.pi if cavity else 1.0
        prediction = total_squeezing(
            xi0_sq, args.zeta, math.sqrt(k) / enhancement, args.d_eff, cavity
        )
        _print_table(
            f"Decoherence zeta = {args.zeta:g}, d_eff = {args.d_eff:g}",
            [
                ("eta_tau", prediction.eta_tau),
                ("xi^2", prediction.xi_sq),
                ("xi^2 (dB)", prediction.xi_sq_db),
            ],
        )

    coupling = coupling_set(
        params.transition(),
        params.ensemble(),
        params.probe(),
        args.duty,
        StrobeConfig().pole_guard_linewidths,
    )
    _print_table(
        f"Couplings at detuning {params.detuning_hz:.6g} Hz",
        [
            ("a0", coupling.a0),
            ("a1", coupling.a1),
            ("a2", coupling.a2),
            ("beta", coupling.beta),
            ("kappa_tilde^2", coupling.kappa_tilde**2),
            ("w", coupling.w),
            ("gamma_sw (1/s)", coupling.gamma_sw),
        ],
    )
    if cavity is not None:
        rows: list[tuple[str, Any]] = [
            ("finesse", cavity.finesse),
            ("enhancement 2F/pi", 2.0 * cavity.finesse / math.pi),
        ]
        rows += list(cavity_terms(cavity).items())
        if args.zeta > 0.0:
            xi_opt, t2_opt = optimal_cavity_squeezing(
                args.zeta, args.d_eff, cavity.finesse, params.loss
            )
            rows += [("optimal xi^2 (dB)", to_db(xi_opt)), ("optimal T_2", t2_opt)]
        _print_table("Cavity", rows)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, cli_config: CliConfig) -> int:
    config = _scenario(args)
    overrides = {"jobs": args.jobs} if args.jobs else {}
    settings = cli_config.strobe_settings(**overrides)
    value = args.value if args.value is not None else config.sweep.points()[0]
    row, result = run_point(
        config,
        value,
        settings=settings,
        keep_cycles=args.dump is not None,
        strict=True,
    )
    path = output_path(config)
    RowWriter(path, config.format).append(row)
    print(row)
    if result.report is not None:
        print(result.report)
    if args.dump is not None:
        ground_ref = result.analytic.get("ground_ref")
        seed = derived_seed(config.base_seed, 0, 0)
        write_dump(args.dump, result.run, seed, ground_ref)
        print(f"records written to {args.dump}")
    print(f"row written to {path}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, cli_config: CliConfig) -> int:
    config = _scenario(args)
    settings = cli_config.strobe_settings()
    jobs = args.jobs or cli_config.sweep_jobs
    rows = run_scenario(config, settings=settings, jobs=jobs)
    for row in rows:
        print(row)
    if rows and not any(row.ok for row in rows):
        print("every sweep point failed", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_report(args: argparse.Namespace, cli_config: CliConfig) -> int:
    records = RecordEnsemble.from_dump(args.dump)
    _, metadata = read_dump(args.dump)
    ground_ref = args.ground_ref or metadata.ground_ref
    if ground_ref is None:
        raise ConfigError(
            "no ground reference in the dump; pass --ground-ref", key="ground_ref"
        )
    settings = cli_config.strobe_settings()
    report = squeezing_report(records, ground_ref)
    lo, hi = bootstrap_ci(
        "xi_tilde_sq",
        records,
        n_resamples=settings.bootstrap_resamples,
        seed=metadata.base_seed + settings.bootstrap_seed_offset,
        ground_ref=ground_ref,
        jobs=settings.jobs,
    )
    report = report.model_copy(update={"ci_lo_db": to_db(lo), "ci_hi_db": to_db(hi)})
    payload = report.to_json_dict()
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(payload, indent=2))
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(report)
    return EXIT_OK


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        dest="scenario",
        required=True,
        help="Scenario file (JSON or YAML) or bundled scenario name",
    )
    parser.add_argument("--seed", type=int, help="Base seed (overrides the scenario)")
    parser.add_argument("--traj", type=int, help="Trajectories per point")
    parser.add_argument("--out", type=Path, help="Output directory")
    parser.add_argument("--format", choices=["csv", "json"], help="Output format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="strobe",
        description="Stroboscopic back-action-evading measurement simulator",
    )
    parser.add_argument(
        "--verbose", "-v", action="store_true", help="Debug logging to stderr"
    )
    parser.add_argument(
        "--config",
        dest="cli_config",
        type=Path,
        help="CLI configuration YAML (default: ./strobe.yaml)",
    )
    sub = parser.add_subparsers(dest="command")

    analytics_parser = sub.add_parser(
        "analytics", help="Print closed-form predictions for a probe setting"
    )
    analytics_parser.add_argument(
        "--duty", type=float, default=0.15, help="Duty cycle D in (0, 1]"
    )
    analytics_parser.add_argument(
        "--kappa2", type=float, default=1.0, help="Effective coupling kappa_tilde^2"
    )
    analytics_parser.add_argument(
        "--zeta", type=float, default=0.0, help="Decoherence prefactor"
    )
    analytics_parser.add_argument(
        "--d-eff", type=float, default=1.0, help="Effective optical depth"
    )
    analytics_parser.add_argument(
        "--params", help="Parameter file or bundled set (default: cs_d2)"
    )
    analytics_parser.add_argument(
        "--detuning", type=frequency_arg, help="Probe detuning, e.g. --detuning=-1.6GHz"
    )
    analytics_parser.add_argument(
        "--cavity", action="store_true", help="Include the probe cavity"
    )

    simulate_parser = sub.add_parser("simulate", help="Run one protocol point")
    _add_run_options(simulate_parser)
    simulate_parser.add_argument(
        "--value", type=float, help="Sweep value (default: the first point)"
    )
    simulate_parser.add_argument(
        "--dump", type=Path, help="Write the per-cycle record dump here"
    )
    simulate_parser.add_argument("--jobs", type=int, help="Trajectory threads")

    sweep_parser = sub.add_parser("sweep", help="Run a scenario sweep")
    _add_run_options(sweep_parser)
    sweep_parser.add_argument(
        "--jobs", type=int, help="Sweep points run concurrently"
    )

    report_parser = sub.add_parser(
        "report", help="Squeezing report from a record dump"
    )
    report_parser.add_argument("--dump", type=Path, required=True, help="Record dump")
    report_parser.add_argument(
        "--ground-ref",
        type=float,
        help="Coherent-state oscillator noise (default: from the dump)",
    )
    report_parser.add_argument("--out", type=Path, help="Write the report JSON here")
    report_parser.add_argument(
        "--json", action="store_true", help="Print JSON instead of text"
    )
    return parser


COMMANDS = {
    "analytics": cmd_analytics,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "report": cmd_report,
}


def run(argv: list[str] | None = None) -> int:
    """Parse arguments, dispatch the subcommand and map errors to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command not in COMMANDS:
        parser.print_help()
        return EXIT_CONFIG

    try:
        cli_config = get_cli_config(args.cli_config)
    except ConfigError as e:
        print(f"strobe: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(
        level=logging.DEBUG if args.verbose or cli_config.debug else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    logger.debug("command=%s config=%s", args.command, cli_config)
    try:
        return COMMANDS[args.command](args, cli_config)
    except ConfigError as e:
        key = f" (key: {e.key})" if e.key else ""
        print(f"strobe: config error{key}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, GridError) as e:
        print(f"strobe: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (StrobeError, ValueError) as e:
        print(f"strobe: error: {e}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

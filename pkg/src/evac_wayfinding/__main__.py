"""Command-line entry point for the evacuation wayfinding simulator."""

import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

try:
    from dotenv import load_dotenv
    load_dotenv()  # Load EVAC_LOG_LEVEL and friends from .env
except ImportError:
    # python-dotenv not installed, will use system environment variables
    pass

from evac_wayfinding.config import AppConfig, load_config_from_yaml
from evac_wayfinding.exceptions import ExportError, ScenarioError
from evac_wayfinding.simulation import (
    PRESET_NAMES,
    export,
    load_scenario_file,
    plot_trajectories,
    run,
    run_fig3,
    run_table1,
    sweep_memory,
    write_sweep,
    write_table1,
)
from evac_wayfinding.simulation.presets import FIG3_WINDOWS
from evac_wayfinding.utils import (
    log_preset_row,
    log_run_start,
    log_run_summary,
    log_sweep_row,
    log_validation,
    setup_logger,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_IO = 2

logger = None


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments.

    Args:
        argv: Argument list (defaults to ``sys.argv[1:]``)

    Returns:
        Parsed arguments
    """
    parser = argparse.ArgumentParser(
        prog="evac-wayfinding",
        description="Cognitive agent-based evacuation wayfinding simulator"
    )

    parser.add_argument(
        "--config",
        default="config.yaml",
        help="Application settings file (default: config.yaml)"
    )

    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Enable verbose (DEBUG) logging"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="Run one scenario and export trajectories and metrics")
    run_p.add_argument("--scenario", required=True, help="Scenario file (.json, .yaml)")
    run_p.add_argument("--seed", type=int, help="Override the scenario seed")
    run_p.add_argument("--out", help="Output directory (default: output.directory from the config)")
    run_p.add_argument("--agents", type=int, help="Override the number of focal agents")
    run_p.add_argument("--theta", type=float, help="Override the macro-decision threshold")
    run_p.add_argument("--memory-window", type=int, help="Override the memory window W")
    run_p.add_argument("--plot", action="store_true", help="Also save trajectories.png (needs matplotlib)")

    sweep_p = sub.add_parser("sweep", help="Mean prediction entropy as a function of the memory window")
    sweep_p.add_argument("--scenario", required=True, help="Scenario file (.json, .yaml)")
    sweep_p.add_argument("--windows", type=int, nargs="+", default=list(FIG3_WINDOWS),
                         help="Memory windows to evaluate (default: 1..6)")
    sweep_p.add_argument("--seeds", type=int, default=20, help="Seeds per window (default: 20)")
    sweep_p.add_argument("--out", help="Output directory")
    sweep_p.add_argument("--workers", type=int, default=1, help="Worker processes (default: 1)")

    preset_p = sub.add_parser("preset", help=f"Run a built-in experiment ({', '.join(PRESET_NAMES)})")
    preset_p.add_argument("--name", required=True, help="Preset name")
    preset_p.add_argument("--out", help="Output directory")
    preset_p.add_argument("--seed", type=int, default=0, help="Seed for the table1 cases (default: 0)")
    preset_p.add_argument("--seeds", type=int, default=20, help="Seeds per window for fig3 (default: 20)")
    preset_p.add_argument("--scenario", help="Scenario for fig3 (default: built-in reference junction)")
    preset_p.add_argument("--workers", type=int, default=1, help="Worker processes (default: 1)")

    validate_p = sub.add_parser("validate", help="Check a scenario file without running it")
    validate_p.add_argument("--scenario", required=True, help="Scenario file (.json, .yaml)")

    return parser.parse_args(argv)


def configure_logging(config: AppConfig, verbose: bool):
    """Set up loguru; ``--verbose`` beats ``EVAC_LOG_LEVEL`` beats the config file."""
    level = "DEBUG" if verbose else os.environ.get("EVAC_LOG_LEVEL", config.logging.level)
    return setup_logger(
        "evac_wayfinding",
        level.upper(),
        log_file=config.logging.file,
        use_colors=config.logging.colors,
    )


def _out_dir(args: argparse.Namespace, config: AppConfig) -> Path:
    return Path(args.out or config.output.directory)


def cmd_run(args: argparse.Namespace, config: AppConfig) -> int:
    scenario = load_scenario_file(args.scenario, defaults=config.tunables)
    scenario = scenario.with_overrides(
        seed=args.seed,
        agents=args.agents,
        theta=args.theta,
        memory_window=args.memory_window,
    )
    log_run_start(logger, scenario)

    result = run(scenario)
    log_run_summary(logger, result)

    out = _out_dir(args, config)
    export(result, out)
    if args.plot:
        plot_trajectories(result, out / "trajectories.png", scenario)

    shares = " ".join(f"route{route}={pct:.1f}%" for route, pct in result.route_percent.items())
    print(f"{scenario.name}: {shares or 'no commitments'} evac_time_s={result.evac_time_s:.1f} "
          f"uncommitted={len(result.uncommitted)} -> {out}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: AppConfig) -> int:
    scenario = load_scenario_file(args.scenario, defaults=config.tunables)
    rows = sweep_memory(scenario, args.windows, args.seeds, workers=args.workers)
    for row in rows:
        log_sweep_row(logger, row)
    path = write_sweep(rows, _out_dir(args, config))
    print(f"{scenario.name}: {len(rows)} window(s) x {args.seeds} seed(s) -> {path}")
    return EXIT_OK


def cmd_preset(args: argparse.Namespace, config: AppConfig) -> int:
    if args.name not in PRESET_NAMES:
        print(f"unknown preset {args.name!r}; valid presets: {', '.join(PRESET_NAMES)}", file=sys.stderr)
        return EXIT_INPUT

    out = _out_dir(args, config)
    if args.name == "table1":
        rows = run_table1(seed=args.seed, workers=args.workers)
        for row in rows:
            log_preset_row(logger, row)
        path = write_table1(rows, out)
        matches = sum(row.majority_match for row in rows)
        print(f"table1: {matches}/{len(rows)} majority matches -> {path}")
    else:
        scenario = load_scenario_file(args.scenario, defaults=config.tunables) if args.scenario else None
        rows = run_fig3(seeds=args.seeds, workers=args.workers, scenario=scenario)
        for row in rows:
            log_sweep_row(logger, row)
        path = write_sweep(rows, out)
        print(f"fig3: {len(rows)} window(s) x {args.seeds} seed(s) -> {path}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, config: AppConfig) -> int:
    scenario = load_scenario_file(args.scenario, defaults=config.tunables)
    summary = {"routes": scenario.route_count, "sources": scenario.source_count, "agents": scenario.agents.count}
    log_validation(logger, summary)
    print(f"OK {scenario.name}: M={summary['routes']} N={summary['sources']} agents={summary['agents']}")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "preset": cmd_preset,
    "validate": cmd_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point.

    Returns:
        Process exit code: 0 success, 1 input error, 2 I/O error
    """
    global logger
    args = parse_args(argv)
    config = load_config_from_yaml(args.config)
    logger = configure_logging(config, args.verbose)

    try:
        return COMMANDS[args.command](args, config)
    except (ScenarioError, FileNotFoundError) as e:
        logger.error(f"❌ {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ExportError, OSError) as e:
        logger.error(f"💾 {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        logger.info("🛑 Interrupted by user")
        return EXIT_INPUT
    except Exception as e:
        logger.exception(f"💥 Unexpected error: {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

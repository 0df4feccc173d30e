"""Command line: ``gouysplit simulate CONFIG`` or ``gouysplit scenario NAME``.

Exit status: 0 success, 1 configuration error, 2 numerical or resolution
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import SCENARIOS, ScenarioConfig, load_config
from .errors import ConfigError, SimulationError

log = logging.getLogger("gouysplit")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gouysplit",
        description="Self-splitting beams and SPDC coincidence scenarios")
    parser.add_argument("--list", action="store_true", help="list the available scenarios")
    sub = parser.add_subparsers(dest="command")

    sim = sub.add_parser("simulate", help="run the scenario described by a config file")
    sim.add_argument("config", help="path to the config file")
    sim.add_argument("--out", help="output directory (overrides [output] dir)")
    sim.add_argument("--plot", action="store_true", help="also render PNG figures")

    sc = sub.add_parser("scenario", help="run a named scenario with default settings")
    sc.add_argument("name", nargs="?", choices=SCENARIOS)
    sc.add_argument("--list", action="store_true", dest="list_scenarios",
                    help="list the available scenarios")
    sc.add_argument("--theta-c", type=float, help="control phase [rad]")
    sc.add_argument("--z-det", type=float, help="crystal-to-detector distance for both arms [m]")
    sc.add_argument("--out", help="output directory")
    sc.add_argument("--plot", action="store_true", help="also render PNG figures")
    return parser


def _config_from_args(args) -> ScenarioConfig:
    if args.command == "simulate":
        cfg = load_config(args.config)
        return cfg.with_overrides(output_dir=args.out, plot=True if args.plot else None)
    if args.z_det is not None and not args.z_det > 0:
        raise ConfigError("--z-det must be positive", key="z_det")
    return ScenarioConfig(args.name).with_overrides(
        theta_c=args.theta_c, z_s=args.z_det, z_i=args.z_det, output_dir=args.out,
        plot=True if args.plot else None)


def main(argv=None) -> int:
    from .scenarios import run_scenario

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list or getattr(args, "list_scenarios", False):
        print("\n".join(SCENARIOS))
        return EXIT_OK
    if args.command is None or (args.command == "scenario" and args.name is None):
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _config_from_args(args)
        paths = run_scenario(cfg)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except (SimulationError, ValueError, ArithmeticError) as exc:
        log.error("numerical error: %s", exc)
        return EXIT_NUMERIC
    for p in paths:
        print(p)
    return EXIT_OK

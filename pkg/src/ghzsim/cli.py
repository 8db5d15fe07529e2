"""Command-line front end: run one registered scenario.

    ghzsim <scenario> [--config FILE] [--out DIR] [--cutoff N]
                      [--tmax T] [--rtol X] [--check]

Writes the scenario's CSV, summary, and plot script into the output
directory and prints the summary.  With --check the exit status is
nonzero when any reproduced number misses its target.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .experiments import SCENARIOS, parse_config, run_scenario, scenario_defaults


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzsim",
        description="dissipative GHZ-state preparation scenarios",
    )
    parser.add_argument("scenario", choices=sorted(SCENARIOS), help="registered scenario")
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--cutoff", type=int, help="cavity photon-number cutoff")
    parser.add_argument("--tmax", type=float, help="final time in units of 1/g")
    parser.add_argument("--rtol", type=float, help="integrator relative tolerance")
    parser.add_argument(
        "--check", action="store_true",
        help="exit nonzero when a reproduced number misses its target",
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.config is not None:
        config = parse_config(args.config.read_text(), args.scenario)
    else:
        config = scenario_defaults(args.scenario)
    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = str(args.out)
    if args.cutoff is not None:
        overrides["cutoff"] = args.cutoff
    if args.tmax is not None:
        overrides["tmax"] = args.tmax
    if args.rtol is not None:
        overrides["rtol"] = args.rtol
    if overrides:
        config = config.with_updates(**overrides)

    result = run_scenario(config)
    for key, val in result.summary.items():
        print(f"{key} = {val}")
    for check in result.checks:
        print(check.render())
    for path in result.csv_paths:
        print(f"wrote {path}")
    if args.check and not result.all_passed:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

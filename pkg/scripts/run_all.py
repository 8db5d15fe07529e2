"""Run every registered scenario and aggregate the pass/fail report.

The slow rows come last so the cheap ones fail fast on a broken install.
Expect the cavity-laser steady-state scenarios (fig4-full, gfluct, table)
to take several minutes each on one core.
"""

import argparse
import sys
import time
from pathlib import Path

from ghzsim import emit_report, run_scenario, scenario_defaults

ORDER = (
    "zeno-report",
    "fig3",
    "fig3-inset",
    "appendix",
    "fig4-eff",
    "fig4-full",
    "gfluct",
    "table",
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("runs"), help="output directory root")
    parser.add_argument(
        "--only", nargs="*", choices=ORDER, default=None, help="restrict to these scenarios"
    )
    parser.add_argument(
        "--skip", nargs="*", choices=ORDER, default=(), help="scenarios to leave out"
    )
    args = parser.parse_args(argv)

    names = [n for n in ORDER if (args.only is None or n in args.only) and n not in args.skip]
    results = []
    for name in names:
        cfg = scenario_defaults(name).with_updates(out_dir=str(args.out / name))
        start = time.perf_counter()
        result = run_scenario(cfg)
        elapsed = time.perf_counter() - start
        results.append(result)
        print(f"[{name}] done in {elapsed:.1f} s")
        for key, value in result.summary.items():
            print(f"  {key} = {value}")
        for check in result.checks:
            print(f"  {check.render()}")

    report = emit_report(results, args.out / "report.txt")
    print()
    print(report, end="")
    print(f"wrote {args.out / 'report.txt'}")
    return 0 if all(r.all_passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())

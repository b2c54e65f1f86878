#!/usr/bin/env python3
"""Reproduce the full-size reference rows for the linear mechanisms.

Generates the 10-graph LG/LU benchmark (seeds 100-109, 17117 rows), then
self-evaluates every level so the reference values land in one summary
table. Expect roughly 5-10 minutes single-threaded.
"""

import argparse
import time
from pathlib import Path

from scmbench.harness import BenchConfig, cmd_evaluate, cmd_generate, cmd_report

LEVELS = ("skeleton", "mec", "direction", "lingam", "downstream")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="reference_run")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument(
        "--levels", nargs="+", default=list(LEVELS), choices=LEVELS, metavar="LEVEL"
    )
    args = parser.parse_args()

    out = Path(args.out)
    bench = out / "bench"
    config = BenchConfig(mechanisms=("LG", "LU"))

    start = time.perf_counter()
    cmd_generate(config, bench)
    print(f"generated 20 datasets in {time.perf_counter() - start:.1f}s")

    reports = []
    for level in args.levels:
        t0 = time.perf_counter()
        path = out / f"report_{level}.json"
        cmd_evaluate(level, bench, bench, path, jobs=args.jobs, syn_label="self")
        reports.append(path)
        print(f"evaluated {level:<10s} in {time.perf_counter() - t0:.1f}s")

    summary = cmd_report(reports, out / "summary")
    print(f"\ntotal {time.perf_counter() - start:.1f}s")
    for mech, rows in summary["mechanisms"].items():
        print(f"\n[{mech}] reference row:")
        for metric, value in sorted(rows["ref"].items()):
            print(f"  {metric:<28s} {value:.4f}")


if __name__ == "__main__":
    main()

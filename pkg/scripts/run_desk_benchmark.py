#!/usr/bin/env python3
"""Reduced end-to-end benchmark cycle: generate, evaluate all levels, report.

Three LG graphs at 5000 rows with 2 bootstraps; finishes in a couple of
minutes on a laptop. Useful as a smoke test of the whole pipeline and as
a template for custom configs.
"""

import argparse
import time
from pathlib import Path

from scmbench.harness import BenchConfig, cmd_evaluate, cmd_generate, cmd_report

LEVELS = ("skeleton", "mec", "direction", "lingam", "downstream")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="desk_run", help="working directory")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    config = BenchConfig(
        n_graphs=3,
        seeds=(100, 101, 102),
        mechanisms=("LG",),
        n_rows=5_000,
        bootstrap_count=2,
        bootstrap_size=4_000,
        eval_sample_size=4_000,
    )
    out = Path(args.out)
    bench = out / "bench"

    start = time.perf_counter()
    cmd_generate(config, bench)
    print(f"generated benchmark in {time.perf_counter() - start:.1f}s -> {bench}")

    reports = []
    for level in LEVELS:
        t0 = time.perf_counter()
        path = out / f"report_{level}.json"
        cmd_evaluate(level, bench, bench, path, jobs=args.jobs, syn_label="self")
        reports.append(path)
        print(f"evaluated {level:<10s} in {time.perf_counter() - t0:.1f}s")

    summary = cmd_report(reports, out / "summary")
    print(f"\ntotal {time.perf_counter() - start:.1f}s; summary tables in {out / 'summary'}")
    for mech, rows in summary["mechanisms"].items():
        print(f"\n[{mech}] reference row:")
        for metric, value in sorted(rows["ref"].items()):
            print(f"  {metric:<28s} {value:.4f}")


if __name__ == "__main__":
    main()

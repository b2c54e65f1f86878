"""Command-line entry point.

Subcommands: generate, evaluate, report, baseline. Exit codes: 0 success,
1 usage error, 2 evaluation failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .baselines import KINDS
from .errors import DomainError, ParameterError
from .harness import (
    LEVELS,
    BenchConfig,
    EvaluationError,
    cmd_baseline,
    cmd_evaluate,
    cmd_generate,
    cmd_report,
    load_config,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EVALUATION = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scmbench",
        description="Generate causal-DAG-grounded benchmark tables and score synthetic data on them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write benchmark datasets, DAGs, SCMs, and a manifest")
    gen.add_argument("--config", help="JSON config file (defaults used when omitted)")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--seed-override", type=int, default=None,
                     help="replace the graph seeds with this value onward")

    ev = sub.add_parser("evaluate", help="score synthetic CSVs against a benchmark directory")
    ev.add_argument("--level", required=True, choices=LEVELS)
    ev.add_argument("--bench-dir", required=True)
    ev.add_argument("--syn-dir", required=True)
    ev.add_argument("--out", required=True, help="report JSON path")
    ev.add_argument("--jobs", type=int, default=1)
    ev.add_argument("--bootstrap-mode", choices=("without", "with"), default=None)
    ev.add_argument("--syn-label", default=None, help="model name for reports (default: syn dir name)")

    rep = sub.add_parser("report", help="merge level reports into summary tables and plot data")
    rep.add_argument("reports", nargs="+", help="evaluate-report JSON files")
    rep.add_argument("--out", required=True, help="output directory")

    base = sub.add_parser("baseline", help="fit and sample a built-in reference synthesizer")
    base.add_argument("--kind", required=True, choices=KINDS)
    base.add_argument("--bench-dir", required=True)
    base.add_argument("--out", required=True)
    base.add_argument("--seed", type=int, default=0)
    return parser


def _run(args: argparse.Namespace) -> int:
    if args.command == "generate":
        config = load_config(args.config) if args.config else BenchConfig()
        if args.seed_override is not None:
            seeds = tuple(range(args.seed_override, args.seed_override + config.n_graphs))
            config = dataclasses.replace(config, seeds=seeds)
        manifest = cmd_generate(config, args.out)
        print(f"wrote {len(manifest['files'])} files to {args.out}")
        return EXIT_OK
    if args.command == "evaluate":
        report = cmd_evaluate(
            args.level,
            args.bench_dir,
            args.syn_dir,
            args.out,
            jobs=args.jobs,
            bootstrap_mode=args.bootstrap_mode,
            syn_label=args.syn_label,
        )
        n_err = sum(
            1 for per_graph in report["cells"].values() for c in per_graph.values() if "error" in c
        )
        print(f"wrote {args.out} ({n_err} cell errors)")
        return EXIT_EVALUATION if n_err else EXIT_OK
    if args.command == "report":
        cmd_report(args.reports, args.out)
        print(f"wrote summary files to {args.out}")
        return EXIT_OK
    if args.command == "baseline":
        written = cmd_baseline(args.kind, args.bench_dir, args.out, seed=args.seed)
        print(f"wrote {len(written)} synthetic datasets to {args.out}")
        return EXIT_OK
    raise ParameterError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _run(args)
    except (ParameterError, DomainError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EvaluationError as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return EXIT_EVALUATION
    except (OSError, FileNotFoundError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

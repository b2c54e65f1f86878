"""Benchmark orchestration: generate, evaluate, aggregate, report.

The full protocol: sample DAGs from seeds, realize each with every
mechanism family, write the datasets (plus an independent binary column)
to disk, then score arbitrary synthetic CSVs against the ground truth at
five levels (skeleton, mec, direction, lingam, downstream). Reference
rows come from evaluating the benchmark data itself.

Every cell of the evaluation grid is an isolated pure computation keyed
by (graph seed, mechanism), so cells can fan out to worker processes;
report assembly is a single reduction at the end. Reruns with identical
inputs are byte-identical apart from the report's created_at field, which
is excluded from the content hash.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd
import scipy

from . import baselines
from .discovery import DIRECTION_METHODS, best_of_direction, direct_lingam, pc_skeleton
from .downstream import LINEAR, POLY, DownstreamConfig, downstream_eval
from .errors import DomainError, ParameterError
from .graphs import (
    Dag,
    ci_benchmark_triples,
    direction_eval_edges,
    load_dag,
    save_adjacency_csv,
    save_dag,
    skeleton_of,
)
from .metrics import ci_auc_score, dag_score, skeleton_score
from .scm import (
    Dataset,
    append_binary_column,
    derive_seed,
    generate,
    load_dataset,
    load_scm,
    sample_scm,
    save_dataset,
    save_scm,
)
from .stats import CorrelationCache, kci_test, roc_auc

LEVELS = ("skeleton", "mec", "direction", "lingam", "downstream")
LINEAR_FAMILIES = ("LG", "LU")

DEVIATIONS = (
    "direction battery substitutes an additive-noise residual-independence method "
    "for the third bivariate algorithm",
    "bootstrap resampling defaults to without-replacement subsampling at size <= n_rows",
    "CI AUC scores are p-values with ground-truth independence as the positive label",
)


class EvaluationError(RuntimeError):
    """A level could not be evaluated at all (as opposed to per-cell failures)."""


@dataclass(frozen=True)
class BenchConfig:
    """Knobs of the benchmark protocol; defaults mirror the full-size setup."""

    n_graphs: int = 10
    n_nodes: int = 10
    seeds: tuple[int, ...] = ()
    mechanisms: tuple[str, ...] = ("LG", "LU", "SG", "NG")
    n_rows: int = 17117
    expected_degree: float = 3.0
    eval_sample_size: int = 15000
    kernel_skeleton_size: int = 1500
    kernel_mec_size: int = 5000
    bootstrap_count: int = 5
    bootstrap_size: int = 15000
    alpha: float = 0.05
    max_cond_size: int = 4
    k_interventions: int = 10
    n_interventional_samples: int = 1000
    n_counterfactual_observations: int = 1000
    bootstrap_mode: str = "without"
    binary_column: str = "B"

    def __post_init__(self):
        if not self.seeds:
            object.__setattr__(self, "seeds", tuple(range(100, 100 + self.n_graphs)))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "mechanisms", tuple(str(m) for m in self.mechanisms))
        if self.n_graphs < 1 or self.n_nodes < 2 or self.n_rows < 1:
            raise ParameterError("counts must be positive")
        if len(self.seeds) != self.n_graphs:
            raise ParameterError("need exactly one seed per graph")
        if len(set(self.seeds)) != len(self.seeds):
            raise ParameterError("seeds must be unique")
        for m in self.mechanisms:
            if m not in ("LG", "LU", "SG", "NG"):
                raise ParameterError(f"unknown mechanism {m!r}")
        if self.bootstrap_mode not in ("without", "with"):
            raise ParameterError("bootstrap_mode must be 'without' or 'with'")
        if self.bootstrap_mode == "without" and self.bootstrap_size > self.n_rows:
            raise ParameterError("bootstrap_size cannot exceed n_rows without replacement")
        if any(
            v < 1
            for v in (
                self.eval_sample_size,
                self.kernel_skeleton_size,
                self.kernel_mec_size,
                self.bootstrap_count,
                self.bootstrap_size,
                self.k_interventions,
                self.n_interventional_samples,
            )
        ):
            raise ParameterError("sample sizes and counts must be positive")
        if not (0.0 < self.alpha < 1.0):
            raise ParameterError("alpha must be in (0, 1)")


def config_to_dict(config: BenchConfig) -> dict:
    return dataclasses.asdict(config)


def config_from_dict(obj: dict) -> BenchConfig:
    known = {f.name for f in dataclasses.fields(BenchConfig)}
    unknown = set(obj) - known
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    coerced = dict(obj)
    for key in ("seeds", "mechanisms"):
        if key in coerced:
            coerced[key] = tuple(coerced[key])
    return BenchConfig(**coerced)


def load_config(path) -> BenchConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: BenchConfig) -> str:
    return hashlib.sha256(_canonical_json(config_to_dict(config)).encode()).hexdigest()


def dataset_name(graph_seed: int, mechanism: str) -> str:
    return f"g{graph_seed}_{mechanism}"


# --- generation --------------------------------------------------------------


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def cmd_generate(config: BenchConfig, out_dir) -> dict:
    """Write the benchmark corpus and a manifest with content hashes."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    files: dict[str, str] = {}

    def register(path: Path):
        files[path.name] = _sha256_file(path)

    for g in config.seeds:
        dag = build_dag(config, g)
        dag_path = out / f"g{g}.dag.json"
        save_dag(dag, dag_path)
        register(dag_path)
        adj_path = out / f"g{g}.adjacency.csv"
        save_adjacency_csv(dag, adj_path)
        register(adj_path)
        for m in config.mechanisms:
            scm = sample_scm(dag, m, derive_seed(g, m, "scm"))
            ds = generate(scm, config.n_rows, derive_seed(g, m, "data"))
            ds = append_binary_column(ds, derive_seed(g, m, "binary"), name=config.binary_column)
            stem = dataset_name(g, m)
            csv_path = out / f"{stem}.csv"
            noise_path = out / f"{stem}.noise.csv"
            scm_path = out / f"{stem}.scm.json"
            save_dataset(ds, csv_path, noise_path)
            save_scm(scm, scm_path)
            register(csv_path)
            register(noise_path)
            register(scm_path)

    manifest = {
        "config": config_to_dict(config),
        "config_hash": config_hash(config),
        "files": dict(sorted(files.items())),
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def build_dag(config: BenchConfig, graph_seed: int) -> Dag:
    from .graphs import random_dag

    return random_dag(config.n_nodes, config.expected_degree, graph_seed)


# --- evaluation ---------------------------------------------------------------


def bootstrap_resample(ds: Dataset, size: int, seed: int, mode: str = "without") -> Dataset:
    """Deterministic row resample; 'without' mode never duplicates rows."""
    rng = np.random.default_rng(seed)
    if mode == "without":
        if size > ds.n_rows:
            raise ParameterError(f"cannot draw {size} of {ds.n_rows} rows without replacement")
        idx = rng.choice(ds.n_rows, size=size, replace=False)
    elif mode == "with":
        idx = rng.integers(0, ds.n_rows, size=size)
    else:
        raise ParameterError("mode must be 'without' or 'with'")
    noise = None if ds.noise is None else ds.noise[idx]
    return Dataset(ds.column_names, ds.values[idx], noise)


def _load_eval_dataset(path: Path, binary_column: str, expect_columns=None) -> Dataset:
    if not path.exists():
        raise FileNotFoundError(f"missing dataset file {path}")
    ds = load_dataset(path)
    if binary_column in ds.column_names:
        ds = ds.drop_columns([binary_column])
    if expect_columns is not None and ds.column_names != tuple(expect_columns):
        raise ParameterError(
            f"{path.name}: columns {ds.column_names} do not match benchmark header {tuple(expect_columns)}"
        )
    return ds


def _is_linear(mechanism: str) -> bool:
    return mechanism in LINEAR_FAMILIES


def _mean_std(values) -> dict:
    arr = np.asarray(values, dtype=float)
    return {"mean": float(arr.mean()), "std": float(arr.std())}


def _graph_metrics_average(per_bootstrap: list[dict]) -> dict:
    keys = per_bootstrap[0].keys()
    return {k: float(np.mean([b[k] for b in per_bootstrap])) for k in keys}


def eval_cell(level: str, config: BenchConfig, bench_dir, syn_dir, graph_seed: int, mechanism: str) -> dict:
    """Score one (graph, mechanism) cell of one level; pure and picklable."""
    bench_dir, syn_dir = Path(bench_dir), Path(syn_dir)
    dag = load_dag(bench_dir / f"g{graph_seed}.dag.json")
    stem = dataset_name(graph_seed, mechanism)
    bench_ds = _load_eval_dataset(bench_dir / f"{stem}.csv", config.binary_column)
    syn_ds = _load_eval_dataset(
        syn_dir / f"{stem}.csv", config.binary_column, expect_columns=bench_ds.column_names
    )
    if level == "skeleton":
        return _cell_skeleton(config, dag, bench_ds, syn_ds, graph_seed, mechanism)
    if level == "mec":
        return _cell_mec(config, dag, bench_ds, syn_ds, graph_seed, mechanism)
    if level == "direction":
        return _cell_direction(config, dag, bench_ds, syn_ds, graph_seed, mechanism)
    if level == "lingam":
        return _cell_lingam(config, dag, bench_ds, syn_ds, graph_seed, mechanism)
    if level == "downstream":
        return _cell_downstream(config, bench_dir, dag, bench_ds, syn_ds, graph_seed, mechanism)
    raise ParameterError(f"unknown level {level!r}")


def _cell_skeleton(config, dag, bench_ds, syn_ds, g, m) -> dict:
    truth = skeleton_of(dag)
    linear = _is_linear(m)
    size = config.bootstrap_size if linear else config.kernel_skeleton_size
    ci = "fisher_z" if linear else "kci"
    out = {"ref": [], "syn": []}
    for b in range(config.bootstrap_count):
        seed = derive_seed(g, m, "bootstrap", b)
        for side, ds in (("ref", bench_ds), ("syn", syn_ds)):
            sub = bootstrap_resample(ds, min(size, ds.n_rows), seed, config.bootstrap_mode)
            skel, _ = pc_skeleton(sub, ci, config.alpha, config.max_cond_size)
            score = skeleton_score(skel, truth)
            out[side].append(
                {"shd": score.shd, "f1": score.f1, "precision": score.precision, "recall": score.recall}
            )
    return {
        "ref": _graph_metrics_average(out["ref"]),
        "syn": _graph_metrics_average(out["syn"]),
    }


def _cell_mec(config, dag, bench_ds, syn_ds, g, m) -> dict:
    triples = ci_benchmark_triples(dag, derive_seed(g, m, "triples"))
    if not triples:
        raise EvaluationError("graph has no non-adjacent pair; no CI triples to test")
    linear = _is_linear(m)
    size = config.eval_sample_size if linear else config.kernel_mec_size
    seed = derive_seed(g, m, "mec-subsample")
    cell: dict = {}
    for side, ds in (("ref", bench_ds), ("syn", syn_ds)):
        sub = bootstrap_resample(ds, min(size, ds.n_rows), seed, config.bootstrap_mode)
        if linear:
            cache = CorrelationCache(sub.values)
            p_values = [cache.fisher_z(t.x, t.y, sorted(t.cond_set), config.alpha).p_value for t in triples]
        else:
            p_values = [
                kci_test(sub.values, t.x, t.y, sorted(t.cond_set), config.alpha).p_value for t in triples
            ]
        auc, _ = ci_auc_score(triples, p_values)
        cell[side] = {"auc": auc}
        cell[f"{side}_scores"] = {
            "labels": [bool(t.gt_independent) for t in triples],
            "p_values": [float(p) for p in p_values],
        }
    cell["n_triples"] = len(triples)
    return cell


def _cell_direction(config, dag, bench_ds, syn_ds, g, m) -> dict:
    edges = direction_eval_edges(dag)
    if not edges:
        raise EvaluationError("no edge is marginally exposed after deletion; nothing to score")
    size = min(config.eval_sample_size, bench_ds.n_rows, syn_ds.n_rows)
    seed = derive_seed(g, m, "direction-subsample")
    cell: dict = {"n_edges": len(edges)}
    for side, ds in (("ref", bench_ds), ("syn", syn_ds)):
        sub = bootstrap_resample(ds, size, seed, config.bootstrap_mode)
        batch = [(sub.values[:, u], sub.values[:, v], True) for u, v in edges]
        result = best_of_direction(batch)
        correct = {
            method: int(round(acc * result.n_pairs)) for method, acc in result.accuracies
        }
        cell[side] = {
            "best_accuracy": result.best_accuracy,
            "best_method": result.best_method,
            "accuracies": dict(result.accuracies),
            "correct": correct,
        }
    return cell


def _cell_lingam(config, dag, bench_ds, syn_ds, g, m) -> dict:
    out = {"ref": [], "syn": []}
    for b in range(config.bootstrap_count):
        seed = derive_seed(g, m, "lingam-bootstrap", b)
        for side, ds in (("ref", bench_ds), ("syn", syn_ds)):
            sub = bootstrap_resample(ds, min(config.bootstrap_size, ds.n_rows), seed, config.bootstrap_mode)
            est = direct_lingam(sub)
            score = dag_score(est, dag)
            out[side].append(
                {"shd": score.shd, "f1": score.f1, "precision": score.precision, "recall": score.recall}
            )
    return {
        "ref": _graph_metrics_average(out["ref"]),
        "syn": _graph_metrics_average(out["syn"]),
    }


def _cell_downstream(config, bench_dir, dag, bench_ds, syn_ds, g, m) -> dict:
    scm = load_scm(Path(bench_dir) / f"{dataset_name(g, m)}.scm.json")
    cfg = DownstreamConfig(
        regressor_kind=LINEAR if _is_linear(m) else POLY,
        k_interventions=config.k_interventions,
        n_samples=config.n_interventional_samples,
        n_observations=config.n_counterfactual_observations,
        seed=derive_seed(g, m, "downstream"),
        gt_scm=scm,
    )
    # Reference row: self-consistency floor between models trained on two
    # disjoint halves of the benchmark data. Synthetic row: benchmark-trained
    # model versus synthetic-trained model.
    half = bench_ds.n_rows // 2
    first = Dataset(bench_ds.column_names, bench_ds.values[:half])
    second = Dataset(bench_ds.column_names, bench_ds.values[half : 2 * half])
    ref_result = downstream_eval(first, second, dag, cfg)
    syn_result = downstream_eval(bench_ds, syn_ds, dag, cfg)
    return {
        "ref": {
            "interventional_amae": ref_result.interventional_amae,
            "counterfactual_amae": ref_result.counterfactual_amae,
        },
        "syn": {
            "interventional_amae": syn_result.interventional_amae,
            "counterfactual_amae": syn_result.counterfactual_amae,
        },
    }


def _aggregate_level(level: str, cells: dict) -> dict:
    """Mean/std over graphs of every numeric metric, per mechanism and side."""
    aggregates: dict = {}
    for mech, per_graph in cells.items():
        ok = {g: c for g, c in per_graph.items() if "error" not in c}
        if not ok:
            aggregates[mech] = {"error": "all cells failed"}
            continue
        agg: dict = {"n_graphs": len(ok)}
        if level == "direction":
            for side in ("ref", "syn"):
                per_method = {}
                for method in DIRECTION_METHODS:
                    total_correct = sum(c[side]["correct"][method] for c in ok.values())
                    total_n = sum(c["n_edges"] for c in ok.values())
                    per_method[method] = total_correct / total_n
                best_method = max(per_method, key=per_method.get)
                agg[side] = {
                    "pooled_accuracies": per_method,
                    "best_method": best_method,
                    "best_accuracy": per_method[best_method],
                    "per_graph_best": _mean_std([c[side]["best_accuracy"] for c in ok.values()]),
                }
        elif level == "downstream":
            for side in ("ref", "syn"):
                agg[side] = {
                    key: _mean_std([c[side][key] for c in ok.values()])
                    for key in ("interventional_amae", "counterfactual_amae")
                }
        else:
            for side in ("ref", "syn"):
                metric_keys = [k for k in next(iter(ok.values()))[side]]
                agg[side] = {k: _mean_std([c[side][k] for c in ok.values()]) for k in metric_keys}
        aggregates[mech] = agg
    return aggregates


def _pool_roc(cells: dict) -> dict:
    """Recompute per-mechanism ROC curves over all graphs' triples."""
    pooled: dict = {}
    for mech, per_graph in cells.items():
        ok = [c for c in per_graph.values() if "error" not in c]
        if not ok or "ref_scores" not in ok[0]:
            continue
        pooled[mech] = {}
        for side in ("ref", "syn"):
            labels = [l for c in ok for l in c[f"{side}_scores"]["labels"]]
            scores = [p for c in ok for p in c[f"{side}_scores"]["p_values"]]
            auc, points = roc_auc(np.asarray(labels, dtype=bool), np.asarray(scores, dtype=float))
            pooled[mech][side] = {"auc": auc, "roc_points": points}
    return pooled


def cmd_evaluate(
    level: str,
    bench_dir,
    syn_dir,
    out,
    jobs: int = 1,
    bootstrap_mode: str | None = None,
    syn_label: str | None = None,
) -> dict:
    """Run one level over every (graph, mechanism) cell and write the report.

    Per-cell failures are recorded and skipped in the aggregates; the run
    only aborts when no cell of the level can be evaluated at all.
    """
    if level not in LEVELS:
        raise ParameterError(f"level must be one of {LEVELS}")
    bench_dir, syn_dir = Path(bench_dir), Path(syn_dir)
    manifest_path = bench_dir / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"no manifest.json in {bench_dir}")
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    config = config_from_dict(manifest["config"])
    if bootstrap_mode is not None:
        config = dataclasses.replace(config, bootstrap_mode=bootstrap_mode)

    if not any((syn_dir / f"{dataset_name(g, m)}.csv").exists()
               for g in config.seeds for m in config.mechanisms):
        raise EvaluationError(f"no synthetic dataset matching the benchmark naming found in {syn_dir}")

    keys = [(g, m) for m in config.mechanisms for g in config.seeds]
    results: dict[tuple[int, str], dict] = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                key: pool.submit(_eval_cell_safe, level, config, str(bench_dir), str(syn_dir), *key)
                for key in keys
            }
            for key, fut in futures.items():
                results[key] = fut.result()
    else:
        for key in keys:
            results[key] = _eval_cell_safe(level, config, str(bench_dir), str(syn_dir), *key)

    cells: dict = {m: {} for m in config.mechanisms}
    for (g, m), cell in results.items():
        cells[m][str(g)] = cell

    report = {
        "level": level,
        "config": config_to_dict(config),
        "config_hash": manifest["config_hash"],
        "syn_label": syn_label or syn_dir.name,
        "metadata": {
            "alpha": config.alpha,
            "deviations": list(DEVIATIONS),
            "tool_versions": {
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pandas": pd.__version__,
            },
        },
        "cells": cells,
        "aggregates": _aggregate_level(level, cells),
    }
    if level == "mec":
        report["pooled_roc"] = _pool_roc(cells)
    report["content_hash"] = hashlib.sha256(_canonical_json(report).encode()).hexdigest()
    report["created_at"] = datetime.now(timezone.utc).isoformat()
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def _eval_cell_safe(level, config, bench_dir, syn_dir, g, m) -> dict:
    try:
        return eval_cell(level, config, bench_dir, syn_dir, g, m)
    except Exception as exc:  # recorded per cell; the run continues
        return {"error": f"{type(exc).__name__}: {exc}"}


# --- baseline synthesizer runs -----------------------------------------------


def cmd_baseline(kind: str, bench_dir, out_dir, seed: int = 0) -> list[str]:
    """Fit a reference synthesizer per benchmark dataset and sample a twin CSV."""
    bench_dir, out = Path(bench_dir), Path(out_dir)
    with open(bench_dir / "manifest.json", encoding="utf-8") as fh:
        config = config_from_dict(json.load(fh)["config"])
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for g in config.seeds:
        for m in config.mechanisms:
            stem = dataset_name(g, m)
            ds = load_dataset(bench_dir / f"{stem}.csv")
            model = baselines.fit(ds, kind)
            sampled = baselines.sample(model, ds.n_rows, derive_seed(seed, kind, g, m))
            save_dataset(sampled, out / f"{stem}.csv")
            written.append(f"{stem}.csv")
    return written


# --- reporting ----------------------------------------------------------------

_HIGHER_BETTER = ("f1", "auc", "accuracy", "precision", "recall")


def _summary_metrics(level: str, agg: dict, side: str) -> dict[str, float]:
    """Flatten one mechanism aggregate into summary-table columns."""
    if "error" in agg:
        return {}
    out: dict[str, float] = {}
    if level == "skeleton":
        out["skeleton_f1"] = agg[side]["f1"]["mean"]
        out["skeleton_shd"] = agg[side]["shd"]["mean"]
    elif level == "mec":
        out["mec_auc"] = agg[side]["auc"]["mean"]
    elif level == "direction":
        out["direction_accuracy"] = agg[side]["best_accuracy"]
    elif level == "lingam":
        out["lingam_f1"] = agg[side]["f1"]["mean"]
        out["lingam_shd"] = agg[side]["shd"]["mean"]
    elif level == "downstream":
        out["interventional_amae_x100"] = 100.0 * agg[side]["interventional_amae"]["mean"]
        out["counterfactual_amae_x100"] = 100.0 * agg[side]["counterfactual_amae"]["mean"]
    return out


def cmd_report(report_paths, out_dir) -> dict:
    """Merge level reports into summary tables plus plot-data files.

    Emits, per mechanism: a summary CSV/JSON row per model (reference
    first), pooled ROC point files for the MEC level, and radar values
    normalized to [0, 1] with the reference pinned at 1 on every axis.
    """
    reports = []
    for path in report_paths:
        with open(path, encoding="utf-8") as fh:
            reports.append(json.load(fh))
    if not reports:
        raise DomainError("no reports given")
    hashes = {r["config_hash"] for r in reports}
    if len(hashes) != 1:
        raise DomainError("reports come from different benchmark configs")
    seen = set()
    for r in reports:
        key = (r["level"], r["syn_label"])
        if key in seen:
            raise DomainError(f"duplicate report for level {key[0]!r} and model {key[1]!r}")
        seen.add(key)

    mechanisms = sorted({m for r in reports for m in r["aggregates"]})
    models = sorted({r["syn_label"] for r in reports})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    summary: dict = {"config_hash": reports[0]["config_hash"], "mechanisms": {}}
    for mech in mechanisms:
        rows: dict[str, dict[str, float]] = {"ref": {}}
        for model in models:
            rows[model] = {}
        for r in reports:
            if mech not in r["aggregates"]:
                continue
            agg = r["aggregates"][mech]
            rows["ref"].update(_summary_metrics(r["level"], agg, "ref"))
            rows[r["syn_label"]].update(_summary_metrics(r["level"], agg, "syn"))
        summary["mechanisms"][mech] = rows

        columns = sorted({k for row in rows.values() for k in row})
        frame = pd.DataFrame(
            [[row.get(c, float("nan")) for c in columns] for row in rows.values()],
            index=list(rows.keys()),
            columns=columns,
        )
        frame.index.name = "model"
        frame.to_csv(out / f"summary_{mech}.csv")

        radar = {}
        for model, row in rows.items():
            axes = {}
            for col in columns:
                ref_v, model_v = rows["ref"].get(col), row.get(col)
                if ref_v is None or model_v is None:
                    continue
                axes[col] = _radar_value(col, ref_v, model_v)
            radar[model] = axes
        with open(out / f"radar_{mech}.json", "w", encoding="utf-8") as fh:
            json.dump(radar, fh, indent=2, sort_keys=True)
            fh.write("\n")

    for r in reports:
        if r["level"] != "mec" or "pooled_roc" not in r:
            continue
        for mech, sides in r["pooled_roc"].items():
            for side, payload in sides.items():
                label = "ref" if side == "ref" else r["syn_label"]
                path = out / f"roc_{mech}_{label}.csv"
                pd.DataFrame(payload["roc_points"], columns=["fpr", "tpr"]).to_csv(path, index=False)

    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _radar_value(column: str, ref_value: float, model_value: float) -> float:
    """Normalize a metric onto [0, 1] with the reference at 1."""
    lower_better = not any(column.startswith(p) or p in column for p in _HIGHER_BETTER)
    if lower_better:
        ref_value, model_value = ref_value + 1e-12, model_value + 1e-12
        return float(np.clip(ref_value / model_value, 0.0, 1.0))
    if ref_value <= 0:
        return 1.0 if model_value >= ref_value else 0.0
    return float(np.clip(model_value / ref_value, 0.0, 1.0))

"""Scalar metrics comparing extracted causal structure against ground truth."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .graphs import CiTriple, Dag, Skeleton
from .stats import roc_auc

U_TO_V = "u_to_v"


@dataclass(frozen=True)
class GraphScore:
    shd: int
    precision: float
    recall: float
    f1: float


def _prf(tp: int, n_pred: int, n_truth: int) -> tuple[float, float, float]:
    # Empty sides score 1.0: predicting nothing when there is nothing to
    # predict is perfect agreement, and f1 of two empty graphs is 1.0.
    precision = tp / n_pred if n_pred else 1.0
    recall = tp / n_truth if n_truth else 1.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def skeleton_score(pred: Skeleton, truth: Skeleton) -> GraphScore:
    """Precision/recall/F1 over undirected edges; SHD is the symmetric difference."""
    if pred.n_nodes != truth.n_nodes:
        raise ParameterError("node counts differ")
    p, t = pred.undirected_edges, truth.undirected_edges
    tp = len(p & t)
    precision, recall, f1 = _prf(tp, len(p), len(t))
    return GraphScore(len(p ^ t), precision, recall, f1)


def dag_score(pred: Dag, truth: Dag) -> GraphScore:
    """Directed-edge comparison.

    A reversed edge counts once in SHD but as one false positive plus one
    false negative for precision and recall.
    """
    if pred.n_nodes != truth.n_nodes:
        raise ParameterError("node counts differ")
    p, t = set(pred.edges), set(truth.edges)
    extra = p - t
    missing = t - p
    reversals = sum(1 for u, v in extra if (v, u) in missing)
    tp = len(p & t)
    precision, recall, f1 = _prf(tp, len(p), len(t))
    return GraphScore(len(extra) + len(missing) - reversals, precision, recall, f1)


def ci_auc_score(
    triples: Sequence[CiTriple], p_values: Sequence[float]
) -> tuple[float, list[tuple[float, float]]]:
    """AUC of classifying ground-truth independence from CI-test p-values.

    Large p-values are evidence for independence, so the positive label is
    gt_independent and the score is the p-value itself; higher AUC is
    better.
    """
    triples = list(triples)
    p_values = np.asarray(p_values, dtype=float)
    if len(triples) != p_values.shape[0]:
        raise ParameterError("triples and p_values lengths differ")
    labels = np.array([t.gt_independent for t in triples], dtype=bool)
    return roc_auc(labels, p_values)


def direction_accuracy(verdicts, truth: Dag) -> float:
    """Fraction of verdicts whose predicted orientation matches the DAG."""
    verdicts = list(verdicts)
    if not verdicts:
        raise ParameterError("no verdicts given")
    correct = 0
    for verdict in verdicts:
        u, v = verdict.pair
        if (u, v) in truth.edges:
            forward = True
        elif (v, u) in truth.edges:
            forward = False
        else:
            raise ParameterError(f"pair ({u},{v}) is not an edge of the DAG")
        if (verdict.predicted == U_TO_V) == forward:
            correct += 1
    return correct / len(verdicts)


@dataclass(frozen=True)
class AmaeInputs:
    """Outcome tensors indexed (intervened v, value index d, target i, sample s).

    The i == v slice is ignored (a variable is never scored under its own
    intervention).
    """

    ref_table: np.ndarray
    syn_table: np.ndarray

    def __post_init__(self):
        ref = np.asarray(self.ref_table, dtype=float)
        syn = np.asarray(self.syn_table, dtype=float)
        object.__setattr__(self, "ref_table", ref)
        object.__setattr__(self, "syn_table", syn)
        if ref.shape != syn.shape:
            raise ParameterError("ref and syn tables must have identical shapes")
        if ref.ndim != 4 or ref.shape[0] != ref.shape[2]:
            raise ParameterError("tables must be (V, K, V, N)")
        v, k, _, n = ref.shape
        if v < 2 or k < 1 or n < 1:
            raise ParameterError("need V >= 2, K >= 1, N >= 1")


def amae(inputs: AmaeInputs) -> tuple[float, dict[int, float]]:
    """Average mean absolute error between interventional outcome tables.

    MAE(v) averages, over targets i != v and value indices d, the absolute
    difference of the two sample sums (the absolute value wraps the sum
    difference, not per-sample differences); the overall score is the mean
    of MAE(v) over intervened variables. Zero exactly when all per-cell
    sample sums agree.
    """
    ref, syn = inputs.ref_table, inputs.syn_table
    v_count, k_count, _, n_count = ref.shape
    per_variable: dict[int, float] = {}
    for v in range(v_count):
        total = 0.0
        for i in range(v_count):
            if i == v:
                continue
            for d in range(k_count):
                total += abs(float(np.sum(ref[v, d, i])) - float(np.sum(syn[v, d, i])))
        per_variable[v] = total / ((v_count - 1) * k_count * n_count)
    return sum(per_variable.values()) / v_count, per_variable

"""Structural causal models and ground-truth data generation.

Four mechanism families over a shared DAG:

  LG  linear mechanism, Gaussian noise:    x = w . parents + e
  LU  linear mechanism, uniform noise:     x = w . parents + e
  SG  sigmoid mechanism, Gaussian noise:   x = w . sigmoid(parents) + e
  NG  neural-net mechanism, Gaussian noise: x = w1 . sigmoid(w2 . (parents ++ e))

Uniform noise is parameterized by its standard deviation (width 2*sqrt(3)*sigma)
so LG and LU differ only in shape. The NG mechanism has no additive noise
term; its noise enters through the concatenation.

Generation keeps the realized noise matrix next to the samples, which is
what makes exact ground-truth counterfactuals (abduction / action /
prediction) possible later. All operations are pure and deterministic
given explicit seeds.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

from .errors import ParameterError
from .graphs import Dag, dag_from_json, dag_to_json, topological_order

NN_HIDDEN_WIDTH = 20
WEIGHT_LOW, WEIGHT_HIGH = 0.5, 2.0
SIGMA_LOW, SIGMA_HIGH = 0.4, 0.8


class MechanismFamily(str, Enum):
    LG = "LG"
    LU = "LU"
    SG = "SG"
    NG = "NG"

    @property
    def uses_linear_weights(self) -> bool:
        return self in (MechanismFamily.LG, MechanismFamily.LU, MechanismFamily.SG)

    @property
    def gaussian_noise(self) -> bool:
        return self is not MechanismFamily.LU


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary labelled parts (sha256, not hash())."""
    text = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass(frozen=True)
class Scm:
    """Per-node mechanism parameters realizing one family over a DAG.

    ``weights[i]`` is the parent-weight vector of node i (LG/LU/SG).
    For NG, ``nn_w1[i]`` has shape (hidden,) and ``nn_w2[i]`` has shape
    (hidden, n_parents+1); the extra input column is the node's noise.
    """

    dag: Dag
    family: MechanismFamily
    weights: tuple[np.ndarray, ...] | None
    nn_w1: tuple[np.ndarray, ...] | None
    nn_w2: tuple[np.ndarray, ...] | None
    noise_scales: tuple[float, ...]

    def __post_init__(self):
        n = self.dag.n_nodes
        if len(self.noise_scales) != n:
            raise ParameterError("one noise scale per node required")
        if any(s <= 0 for s in self.noise_scales):
            raise ParameterError("noise scales must be positive")
        if self.family.uses_linear_weights:
            if self.weights is None or len(self.weights) != n:
                raise ParameterError("one weight vector per node required")
            for i, w in enumerate(self.weights):
                if w.shape != (len(self.dag.parents_of(i)),):
                    raise ParameterError(f"weight shape mismatch at node {i}")
                if w.size and np.min(np.abs(w)) < WEIGHT_LOW - 1e-12:
                    raise ParameterError(f"weights must stay >= {WEIGHT_LOW} in magnitude")
        else:
            if self.nn_w1 is None or self.nn_w2 is None:
                raise ParameterError("NG mechanism requires nn_w1 and nn_w2")
            for i in range(n):
                p = len(self.dag.parents_of(i))
                if self.nn_w1[i].ndim != 1 or self.nn_w2[i].shape != (self.nn_w1[i].size, p + 1):
                    raise ParameterError(f"NN weight shape mismatch at node {i}")


@dataclass(frozen=True)
class Dataset:
    """Column-named numeric table; optional per-row realized-noise matrix."""

    column_names: tuple[str, ...]
    values: np.ndarray
    noise: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        if values.ndim != 2 or values.shape[1] != len(self.column_names):
            raise ParameterError("values must be 2-D with one column per name")
        if not np.all(np.isfinite(values)):
            raise ParameterError("dataset contains non-finite entries")
        if self.noise is not None:
            noise = np.asarray(self.noise, dtype=float)
            object.__setattr__(self, "noise", noise)
            if noise.shape != values.shape:
                raise ParameterError("noise matrix must match the value matrix shape")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def column_index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise ParameterError(f"no column named {name!r}") from None

    def drop_columns(self, names: Sequence[str]) -> "Dataset":
        keep = [i for i, c in enumerate(self.column_names) if c not in set(names)]
        return Dataset(
            tuple(self.column_names[i] for i in keep),
            self.values[:, keep],
            None if self.noise is None else self.noise[:, keep],
        )


def sample_scm(dag: Dag, family: MechanismFamily | str, seed: int) -> Scm:
    """Draw mechanism parameters for every node.

    Linear/sigmoid weights are uniform on +-[0.5, 2.0] (kept away from
    zero so edges stay detectable); noise scales uniform on [0.4, 0.8];
    NG uses hidden width 20 with standard-normal weights. Deterministic
    for fixed inputs; nodes are visited in index order.
    """
    family = MechanismFamily(family)
    rng = np.random.default_rng(seed)
    weights: list[np.ndarray] = []
    nn_w1: list[np.ndarray] = []
    nn_w2: list[np.ndarray] = []
    sigmas: list[float] = []
    for i in range(dag.n_nodes):
        p = len(dag.parents_of(i))
        if family.uses_linear_weights:
            mag = rng.uniform(WEIGHT_LOW, WEIGHT_HIGH, size=p)
            sign = np.where(rng.random(p) < 0.5, -1.0, 1.0)
            weights.append(mag * sign)
        else:
            nn_w1.append(rng.standard_normal(NN_HIDDEN_WIDTH))
            nn_w2.append(rng.standard_normal((NN_HIDDEN_WIDTH, p + 1)))
        sigmas.append(float(rng.uniform(SIGMA_LOW, SIGMA_HIGH)))
    if family.uses_linear_weights:
        return Scm(dag, family, tuple(weights), None, None, tuple(sigmas))
    return Scm(dag, family, None, tuple(nn_w1), tuple(nn_w2), tuple(sigmas))


def _draw_noise_matrix(scm: Scm, n_rows: int, seed: int) -> np.ndarray:
    """Noise draws for all nodes, in node-index order.

    The stream depends only on (scm, n_rows, seed), never on which nodes
    are intervened, so observational and interventional sampling share
    noise realizations under a shared seed.
    """
    rng = np.random.default_rng(seed)
    noise = np.empty((n_rows, scm.dag.n_nodes))
    for i in range(scm.dag.n_nodes):
        s = scm.noise_scales[i]
        if scm.family.gaussian_noise:
            noise[:, i] = rng.normal(0.0, s, size=n_rows)
        else:
            half = np.sqrt(3.0) * s
            noise[:, i] = rng.uniform(-half, half, size=n_rows)
    return noise


def _mechanism_batch(scm: Scm, node: int, parent_values: np.ndarray) -> np.ndarray:
    """Deterministic part of an additive mechanism, for a batch of rows."""
    if scm.family is MechanismFamily.SG:
        return sigmoid(parent_values) @ scm.weights[node]
    return parent_values @ scm.weights[node]


def _nn_batch(scm: Scm, node: int, parent_values: np.ndarray, noise_col: np.ndarray) -> np.ndarray:
    z = np.concatenate([parent_values, noise_col[:, None]], axis=1)
    return sigmoid(z @ scm.nn_w2[node].T) @ scm.nn_w1[node]


def _evaluate(scm: Scm, drawn: np.ndarray, interventions: Mapping[int, float]) -> tuple[np.ndarray, np.ndarray]:
    """Forward-sample all nodes; returns (values, stored_noise).

    For additive families the stored noise is the residual value minus
    mechanism recomputed after the addition, which makes the per-row
    reconstruction identity hold bit-for-bit. For NG the drawn noise is
    stored unchanged (it enters the mechanism, not an addition).
    """
    n_rows, n = drawn.shape
    values = np.empty((n_rows, n))
    stored = np.array(drawn, copy=True)
    for i in topological_order(scm.dag):
        if i in interventions:
            values[:, i] = float(interventions[i])
            continue
        parents = list(scm.dag.parents_of(i))
        if scm.family.uses_linear_weights:
            mech = _mechanism_batch(scm, i, values[:, parents])
            values[:, i] = mech + drawn[:, i]
            stored[:, i] = values[:, i] - mech
        else:
            values[:, i] = _nn_batch(scm, i, values[:, parents], drawn[:, i])
    return values, stored


def generate(scm: Scm, n_rows: int, seed: int) -> Dataset:
    """i.i.d. rows from the SCM, with the realized noise matrix attached."""
    if n_rows < 1:
        raise ParameterError("n_rows must be >= 1")
    drawn = _draw_noise_matrix(scm, n_rows, seed)
    values, stored = _evaluate(scm, drawn, {})
    return Dataset(scm.dag.node_names, values, stored)


def generate_do(scm: Scm, interventions: Mapping[int, float], n_rows: int, seed: int) -> Dataset:
    """Sample under do(interventions): clamp targets, cut their incoming edges.

    Non-descendants of the intervened nodes get the exact same values as
    ``generate`` with the same seed (shared noise stream).
    """
    if n_rows < 1:
        raise ParameterError("n_rows must be >= 1")
    for node in interventions:
        if not (0 <= node < scm.dag.n_nodes):
            raise ParameterError(f"intervention target {node} out of range")
    drawn = _draw_noise_matrix(scm, n_rows, seed)
    values, _ = _evaluate(scm, drawn, dict(interventions))
    return Dataset(scm.dag.node_names, values)


def ground_truth_counterfactual(
    scm: Scm,
    row_values: np.ndarray,
    row_noise: np.ndarray | None,
    interventions: Mapping[int, float],
) -> np.ndarray:
    """Abduction-action-prediction with the true mechanisms.

    Reuses the realized noise of the factual row, clamps the intervened
    nodes, and re-evaluates mechanisms in topological order. Only
    descendants of intervened nodes are recomputed, so non-descendants
    keep their factual values exactly.
    """
    if row_noise is None:
        raise ParameterError("counterfactuals need the realized noise of the row")
    row_values = np.asarray(row_values, dtype=float)
    row_noise = np.asarray(row_noise, dtype=float)
    n = scm.dag.n_nodes
    if row_values.shape != (n,) or row_noise.shape != (n,):
        raise ParameterError("row_values and row_noise must be vectors over all nodes")
    for node in interventions:
        if not (0 <= node < n):
            raise ParameterError(f"intervention target {node} out of range")

    affected = set(interventions)
    for node in interventions:
        affected |= scm.dag.descendants_of(node)
    out = np.array(row_values, copy=True)
    for i in topological_order(scm.dag):
        if i in interventions:
            out[i] = float(interventions[i])
        elif i in affected:
            parents = list(scm.dag.parents_of(i))
            pv = out[parents][None, :]
            if scm.family.uses_linear_weights:
                out[i] = _mechanism_batch(scm, i, pv)[0] + row_noise[i]
            else:
                out[i] = _nn_batch(scm, i, pv, row_noise[i : i + 1])[0]
    return out


def append_binary_column(ds: Dataset, seed: int, name: str = "B") -> Dataset:
    """Add a fair {0,1} column independent of everything else.

    Being exogenous, the column doubles as its own noise entry when the
    dataset carries a noise matrix.
    """
    if name in ds.column_names:
        raise ParameterError(f"column {name!r} already exists")
    rng = np.random.default_rng(seed)
    col = rng.integers(0, 2, size=ds.n_rows).astype(float)
    values = np.concatenate([ds.values, col[:, None]], axis=1)
    noise = None
    if ds.noise is not None:
        noise = np.concatenate([ds.noise, col[:, None]], axis=1)
    return Dataset(ds.column_names + (name,), values, noise)


def discretize_probs(x: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Per-row category probabilities softmax_k(sigmoid(w_k * x))."""
    logits = sigmoid(np.outer(x, weights))
    shifted = logits - logits.max(axis=1, keepdims=True)
    expd = np.exp(shifted)
    return expd / expd.sum(axis=1, keepdims=True)


def discretize_column(
    ds: Dataset, col: int, k: int, seed: int, weights: np.ndarray | None = None
) -> Dataset:
    """Replace a continuous column by categorical draws in {0, ..., k-1}.

    Each category gets a random scalar weight; row probabilities are
    softmax over sigmoid(w_k * x). The noise matrix is dropped in the
    output because the replaced column no longer has additive noise.
    """
    if k < 2:
        raise ParameterError("need at least 2 categories")
    if not (0 <= col < ds.n_cols):
        raise ParameterError(f"column index {col} out of range")
    rng = np.random.default_rng(seed)
    if weights is None:
        weights = rng.standard_normal(k)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (k,):
        raise ParameterError("need one weight per category")
    probs = discretize_probs(ds.values[:, col], weights)
    cdf = np.cumsum(probs, axis=1)
    u = rng.random(ds.n_rows)
    cats = (u[:, None] > cdf).sum(axis=1)
    values = np.array(ds.values, copy=True)
    values[:, col] = cats.astype(float)
    return Dataset(ds.column_names, values)


# --- persistence -----------------------------------------------------------


def save_dataset(ds: Dataset, path, noise_path=None) -> None:
    """CSV with header row, '.' decimal, full float round-trip precision."""
    pd.DataFrame(ds.values, columns=list(ds.column_names)).to_csv(path, index=False)
    if noise_path is not None:
        if ds.noise is None:
            raise ParameterError("dataset has no noise matrix to save")
        pd.DataFrame(ds.noise, columns=list(ds.column_names)).to_csv(noise_path, index=False)


def load_dataset(path, noise_path=None) -> Dataset:
    # round_trip parsing keeps load(save(ds)) bit-identical.
    frame = pd.read_csv(path, float_precision="round_trip")
    noise = None
    if noise_path is not None:
        noise = pd.read_csv(noise_path, float_precision="round_trip").to_numpy(dtype=float)
    return Dataset(tuple(frame.columns), frame.to_numpy(dtype=float), noise)


def scm_to_json(scm: Scm) -> dict:
    obj = {
        "family": scm.family.value,
        "dag": dag_to_json(scm.dag),
        "noise_scales": list(scm.noise_scales),
    }
    if scm.family.uses_linear_weights:
        obj["weights"] = [w.tolist() for w in scm.weights]
    else:
        obj["nn_w1"] = [w.tolist() for w in scm.nn_w1]
        obj["nn_w2"] = [w.tolist() for w in scm.nn_w2]
    return obj


def scm_from_json(obj: dict) -> Scm:
    dag = dag_from_json(obj["dag"])
    family = MechanismFamily(obj["family"])
    sigmas = tuple(float(s) for s in obj["noise_scales"])
    if family.uses_linear_weights:
        weights = tuple(np.asarray(w, dtype=float) for w in obj["weights"])
        return Scm(dag, family, weights, None, None, sigmas)
    w1 = tuple(np.asarray(w, dtype=float) for w in obj["nn_w1"])
    w2 = tuple(np.asarray(w, dtype=float) for w in obj["nn_w2"])
    return Scm(dag, family, None, w1, w2, sigmas)


def save_scm(scm: Scm, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scm_to_json(scm), fh)
        fh.write("\n")


def load_scm(path) -> Scm:
    with open(path, encoding="utf-8") as fh:
        return scm_from_json(json.load(fh))

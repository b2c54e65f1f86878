"""Downstream causal-inference evaluation.

Additive-noise SCMs are fitted to reference and synthetic data given the
true DAG, then queried with the same interventions and the same random
draws. The average-mean-absolute-error between the two outcome tables
measures how much causal-inference answers drift when a synthesizer
replaces the real data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ParameterError
from .graphs import Dag, topological_order
from .metrics import AmaeInputs, amae
from .scm import Dataset, Scm, derive_seed, generate
from .stats import ols_fit, poly_features

LINEAR = "linear"
POLY = "poly"
POLY_DEGREE = 3
INTERVENTION_GRID_DEFAULT_K = 10


@dataclass(frozen=True)
class NodeModel:
    """One node's fitted mechanism plus its empirical residual pool."""

    parents: tuple[int, ...]
    kind: str
    coefficients: np.ndarray
    parent_means: np.ndarray
    parent_stds: np.ndarray
    residuals: np.ndarray

    def predict(self, parent_values: np.ndarray) -> np.ndarray:
        if not self.parents:
            return np.full(parent_values.shape[0], self.coefficients[0])
        feats = self._features(parent_values)
        return self.coefficients[0] + feats @ self.coefficients[1:]

    def _features(self, parent_values: np.ndarray) -> np.ndarray:
        if self.kind == LINEAR:
            return parent_values
        cols = [
            poly_features(parent_values[:, j], POLY_DEGREE, self.parent_means[j], self.parent_stds[j])
            for j in range(len(self.parents))
        ]
        return np.concatenate(cols, axis=1)


@dataclass(frozen=True)
class FittedScm:
    dag: Dag
    kind: str
    nodes: tuple[NodeModel, ...]

    @property
    def n_train(self) -> int:
        return self.nodes[0].residuals.shape[0]


@dataclass(frozen=True)
class InterventionGrid:
    """K intervention values per variable; values[v] is variable v's list."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 2:
            raise ParameterError("grid must be (n_variables, K)")
        if not np.all(np.isfinite(vals)):
            raise ParameterError("grid values must be finite")

    @property
    def k(self) -> int:
        return self.values.shape[1]


def quantile_grid(ds: Dataset, k: int = INTERVENTION_GRID_DEFAULT_K) -> InterventionGrid:
    """K evenly spaced quantiles (5%, 15%, ...) of each column's marginal."""
    qs = (np.arange(k) + 0.5) / k
    return InterventionGrid(np.quantile(ds.values, qs, axis=0).T)


def fit_anm(ds: Dataset, dag: Dag, regressor_kind: str = LINEAR) -> FittedScm:
    """Regress each node on its parents; keep residuals as the noise pool."""
    if regressor_kind not in (LINEAR, POLY):
        raise ParameterError(f"unknown regressor kind {regressor_kind!r}")
    if ds.n_rows < 100:
        raise ParameterError("need at least 100 rows to fit")
    if set(ds.column_names) != set(dag.node_names):
        raise ParameterError("dataset columns must match DAG nodes")
    col_of = {name: ds.column_index(name) for name in dag.node_names}
    data = ds.values[:, [col_of[name] for name in dag.node_names]]

    nodes = []
    for i in range(dag.n_nodes):
        parents = dag.parents_of(i)
        pv = data[:, list(parents)]
        means = pv.mean(axis=0) if parents else np.zeros(0)
        stds = pv.std(axis=0) if parents else np.zeros(0)
        if parents and np.any(stds == 0.0):
            raise ParameterError(f"constant parent column for node {i}")
        if not parents:
            feats = np.zeros((ds.n_rows, 0))
        elif regressor_kind == LINEAR:
            feats = pv
        else:
            feats = np.concatenate(
                [poly_features(pv[:, j], POLY_DEGREE, means[j], stds[j]) for j in range(len(parents))],
                axis=1,
            )
        fit = ols_fit(feats, data[:, i])
        nodes.append(NodeModel(parents, regressor_kind, fit.coefficients, means, stds, fit.residuals))
    return FittedScm(dag, regressor_kind, tuple(nodes))


def forward_sample(
    fscm: FittedScm,
    n_samples: int,
    seed: int,
    interventions: Mapping[int, float] | None = None,
) -> np.ndarray:
    """Sample rows from the fitted model, resampling residual pools as noise.

    Noise indices are drawn for every node up front (in node-index order),
    so intervening on a node never shifts the draws any other node sees.
    """
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    interventions = dict(interventions or {})
    rng = np.random.default_rng(seed)
    n_nodes = fscm.dag.n_nodes
    idx = rng.integers(0, fscm.n_train, size=(n_samples, n_nodes))
    out = np.empty((n_samples, n_nodes))
    for i in topological_order(fscm.dag):
        if i in interventions:
            out[:, i] = float(interventions[i])
            continue
        model = fscm.nodes[i]
        out[:, i] = model.predict(out[:, list(model.parents)]) + model.residuals[idx[:, i]]
    return out


def interventional_expectations(
    fscm: FittedScm, grid: InterventionGrid, n_samples: int, seed: int
) -> np.ndarray:
    """Outcome tensor (V, K, V, N) of forward samples under each do(v = d).

    Cell [v, d, i, s] is variable i in sample s under the d-th intervention
    on v. Each (v, d) cell has its own derived seed, so two models queried
    with the same seed share their noise-pool indices draw for draw.
    """
    if grid.values.shape[0] != fscm.dag.n_nodes:
        raise ParameterError("grid must cover every variable")
    v_count, k_count = grid.values.shape
    table = np.empty((v_count, k_count, v_count, n_samples))
    for v in range(v_count):
        for d in range(k_count):
            cell_seed = derive_seed(seed, "interventional", v, d)
            sampled = forward_sample(fscm, n_samples, cell_seed, {v: grid.values[v, d]})
            table[v, d] = sampled.T
    return table


def _abduct(fscm: FittedScm, observations: np.ndarray) -> np.ndarray:
    """Per-row residuals implied by the observations (abduction step)."""
    resid = np.empty_like(observations)
    for i in range(fscm.dag.n_nodes):
        model = fscm.nodes[i]
        resid[:, i] = observations[:, i] - model.predict(observations[:, list(model.parents)])
    return resid


def counterfactual_predict(
    fscm: FittedScm,
    observations,
    interventions: Mapping[int, float],
    _residuals: np.ndarray | None = None,
) -> np.ndarray:
    """Counterfactual rows: abduct residuals, clamp targets, re-evaluate.

    Only descendants of intervened nodes are recomputed, so every other
    column keeps its observed value exactly; a factual intervention is an
    identity up to float round-off in the recomputed columns.
    """
    if isinstance(observations, Dataset):
        col_of = {name: observations.column_index(name) for name in fscm.dag.node_names}
        obs = observations.values[:, [col_of[name] for name in fscm.dag.node_names]]
    else:
        obs = np.asarray(observations, dtype=float)
    if obs.ndim != 2 or obs.shape[1] != fscm.dag.n_nodes:
        raise ParameterError("observations must have one column per DAG node")
    for node in interventions:
        if not (0 <= node < fscm.dag.n_nodes):
            raise ParameterError(f"intervention target {node} out of range")

    resid = _abduct(fscm, obs) if _residuals is None else _residuals
    affected = set(interventions)
    for node in interventions:
        affected |= fscm.dag.descendants_of(node)
    out = np.array(obs, copy=True)
    for i in topological_order(fscm.dag):
        if i in interventions:
            out[:, i] = float(interventions[i])
        elif i in affected:
            model = fscm.nodes[i]
            out[:, i] = model.predict(out[:, list(model.parents)]) + resid[:, i]
    return out


def counterfactual_table(
    fscm: FittedScm, observations, grid: InterventionGrid
) -> np.ndarray:
    """Outcome tensor (V, K, V, N_obs) of counterfactuals per do(v = d)."""
    if isinstance(observations, Dataset):
        col_of = {name: observations.column_index(name) for name in fscm.dag.node_names}
        obs = observations.values[:, [col_of[name] for name in fscm.dag.node_names]]
    else:
        obs = np.asarray(observations, dtype=float)
    v_count, k_count = grid.values.shape
    resid = _abduct(fscm, obs)
    table = np.empty((v_count, k_count, v_count, obs.shape[0]))
    for v in range(v_count):
        for d in range(k_count):
            cf = counterfactual_predict(fscm, obs, {v: grid.values[v, d]}, _residuals=resid)
            table[v, d] = cf.T
    return table


@dataclass(frozen=True)
class DownstreamConfig:
    regressor_kind: str = LINEAR
    k_interventions: int = 10
    n_samples: int = 1000
    n_observations: int = 1000
    seed: int = 0
    gt_scm: Scm | None = None


@dataclass(frozen=True)
class DownstreamResult:
    interventional_amae: float
    counterfactual_amae: float
    interventional_per_variable: dict[int, float] = field(repr=False, default_factory=dict)
    counterfactual_per_variable: dict[int, float] = field(repr=False, default_factory=dict)


def downstream_eval(
    ref_ds: Dataset, syn_ds: Dataset, dag: Dag, config: DownstreamConfig = DownstreamConfig()
) -> DownstreamResult:
    """Both downstream tasks: interventional expectations and counterfactuals.

    One model is fitted per dataset; the intervention grid comes from the
    reference marginals; both models are queried with shared seeds so that
    identical inputs give exactly zero error. Counterfactual observations
    are fresh rows from the generating SCM when one is supplied, otherwise
    tail rows of the reference data held out from the counterfactual fits.
    """
    grid = quantile_grid(ref_ds, config.k_interventions)
    fit_ref = fit_anm(ref_ds, dag, config.regressor_kind)
    fit_syn = fit_anm(syn_ds, dag, config.regressor_kind)
    tab_ref = interventional_expectations(fit_ref, grid, config.n_samples, config.seed)
    tab_syn = interventional_expectations(fit_syn, grid, config.n_samples, config.seed)
    intv_amae, intv_per_v = amae(AmaeInputs(tab_ref, tab_syn))

    cf_ref_model, cf_syn_model = fit_ref, fit_syn
    if config.gt_scm is not None:
        obs = generate(config.gt_scm, config.n_observations, derive_seed(config.seed, "cf-observations"))
    else:
        n_obs = min(config.n_observations, ref_ds.n_rows // 2)
        head = Dataset(ref_ds.column_names, ref_ds.values[:-n_obs])
        syn_head = Dataset(syn_ds.column_names, syn_ds.values[: head.n_rows])
        obs = Dataset(ref_ds.column_names, ref_ds.values[-n_obs:])
        cf_ref_model = fit_anm(head, dag, config.regressor_kind)
        cf_syn_model = fit_anm(syn_head, dag, config.regressor_kind)
    cf_ref = counterfactual_table(cf_ref_model, obs, grid)
    cf_syn = counterfactual_table(cf_syn_model, obs, grid)
    cf_amae, cf_per_v = amae(AmaeInputs(cf_ref, cf_syn))
    return DownstreamResult(intv_amae, cf_amae, intv_per_v, cf_per_v)

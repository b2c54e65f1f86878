"""Built-in reference synthesizers.

Two deliberately simple generators bracket the metric range so the
pipeline can demonstrate discriminative power without any deep model: an
independent-marginal sampler (destroys every dependency) and a Gaussian
copula (keeps second-order structure, blind to direction). Their samples
flow through the exact same CSV evaluation path as external synthetic
data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

from .errors import ParameterError
from .scm import Dataset

INDEPENDENT_MARGINAL = "independent_marginal"
GAUSSIAN_COPULA = "gaussian_copula"
KINDS = (INDEPENDENT_MARGINAL, GAUSSIAN_COPULA)


@dataclass(frozen=True)
class SynthModel:
    kind: str
    column_names: tuple[str, ...]
    marginals: tuple[np.ndarray, ...]
    correlation: np.ndarray | None

    @property
    def n_train(self) -> int:
        return self.marginals[0].shape[0]


def fit(ds: Dataset, kind: str) -> SynthModel:
    """Store per-column empirical quantiles, plus a normal-scores correlation
    matrix for the copula."""
    if kind not in KINDS:
        raise ParameterError(f"unknown synthesizer kind {kind!r}")
    if ds.n_rows < 100:
        raise ParameterError("need at least 100 rows to fit")
    marginals = tuple(np.sort(ds.values[:, j]) for j in range(ds.n_cols))
    correlation = None
    if kind == GAUSSIAN_COPULA:
        scores = np.empty_like(ds.values)
        for j in range(ds.n_cols):
            ranks = rankdata(ds.values[:, j], method="average")
            scores[:, j] = norm.ppf((ranks - 0.5) / ds.n_rows)
        correlation = _nearest_psd_correlation(np.corrcoef(scores, rowvar=False))
    return SynthModel(kind, ds.column_names, marginals, correlation)


def _nearest_psd_correlation(corr: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues and restore the unit diagonal."""
    corr = np.atleast_2d(corr)
    vals, vecs = np.linalg.eigh((corr + corr.T) / 2.0)
    vals = np.clip(vals, 1e-10, None)
    fixed = (vecs * vals) @ vecs.T
    scale = np.sqrt(np.diag(fixed))
    return fixed / np.outer(scale, scale)


def _inverse_cdf(sorted_values: np.ndarray, u: np.ndarray) -> np.ndarray:
    n = sorted_values.shape[0]
    grid = (np.arange(n) + 0.5) / n
    return np.interp(u, grid, sorted_values)


def sample(model: SynthModel, n: int, seed: int) -> Dataset:
    """Draw n rows; deterministic per seed."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    rng = np.random.default_rng(seed)
    d = len(model.marginals)
    if model.kind == INDEPENDENT_MARGINAL:
        cols = [model.marginals[j][rng.integers(0, model.n_train, size=n)] for j in range(d)]
        values = np.column_stack(cols)
    else:
        chol = np.linalg.cholesky(model.correlation + 1e-12 * np.eye(d))
        z = rng.standard_normal((n, d)) @ chol.T
        u = norm.cdf(z)
        values = np.column_stack([_inverse_cdf(model.marginals[j], u[:, j]) for j in range(d)])
    return Dataset(model.column_names, values)

"""Statistical primitives: correlation, CI tests, regression, HSIC, ROC.

Conventions shared by every test here: the null hypothesis is
independence, ``independent`` means p > alpha, and degenerate inputs
(constant columns, singular designs) raise instead of returning NaN so
pipelines fail fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import gamma as gamma_dist
from scipy.stats import norm

from .errors import DegenerateDataError, DomainError, ParameterError

HSIC_MAX_SAMPLES = 1000
KCI_MAX_SAMPLES = 1000


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    independent: bool


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares fit; coefficients start with the intercept."""

    coefficients: np.ndarray
    residuals: np.ndarray
    rss: float


def _as_matrix(data) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ParameterError("data must be a 2-D matrix (rows = samples)")
    return data


def _check_columns(data: np.ndarray, x: int, y: int, cond: Sequence[int]) -> None:
    for c in (x, y, *cond):
        if not (0 <= c < data.shape[1]):
            raise ParameterError(f"column index {c} out of range")
    if x == y:
        raise ParameterError("x and y must differ")
    if x in cond or y in cond:
        raise ParameterError("x and y cannot appear in the conditioning set")


def partial_correlation(data, x: int, y: int, cond: Iterable[int] = ()) -> float:
    """rho(x, y | cond) via correlation of regression residuals."""
    data = _as_matrix(data)
    cond = sorted(set(cond))
    _check_columns(data, x, y, cond)
    n = data.shape[0]
    if n <= len(cond) + 3:
        raise ParameterError(f"need more than |cond|+3 = {len(cond) + 3} rows, got {n}")
    for c in (x, y):
        if np.std(data[:, c]) == 0.0:
            raise DegenerateDataError(f"column {c} is constant")
    xv, yv = data[:, x], data[:, y]
    if cond:
        design = np.column_stack([np.ones(n), data[:, cond]])
        if np.linalg.matrix_rank(design) < design.shape[1]:
            raise DegenerateDataError("conditioning design is rank deficient")
        beta, *_ = np.linalg.lstsq(design, np.column_stack([xv, yv]), rcond=None)
        resid = np.column_stack([xv, yv]) - design @ beta
        rx, ry = resid[:, 0], resid[:, 1]
    else:
        rx, ry = xv - xv.mean(), yv - yv.mean()
    nx, ny = np.linalg.norm(rx), np.linalg.norm(ry)
    if nx == 0.0 or ny == 0.0:
        raise DegenerateDataError("residual variance vanished; column determined by cond")
    return float(np.clip(rx @ ry / (nx * ny), -1.0, 1.0))


def fisher_z_test(data, x: int, y: int, cond: Iterable[int], alpha: float) -> TestResult:
    """Fisher-Z conditional independence test on the partial correlation."""
    if not (0.0 < alpha < 1.0):
        raise ParameterError("alpha must be in (0, 1)")
    cond = sorted(set(cond))
    rho = partial_correlation(data, x, y, cond)
    n = np.asarray(data).shape[0]
    return _fisher_z_from_rho(rho, n, len(cond), alpha)


def _fisher_z_from_rho(rho: float, n: int, n_cond: int, alpha: float) -> TestResult:
    dof = n - n_cond - 3
    rho_c = min(max(rho, -1.0 + 1e-16), 1.0 - 1e-16)
    z = float(np.sqrt(dof) * np.arctanh(rho_c))
    p = float(2.0 * norm.sf(abs(z)))
    return TestResult(statistic=z, p_value=p, independent=p > alpha)


class CorrelationCache:
    """Fisher-Z testing backed by one precomputed correlation matrix.

    The partial correlation comes from inverting the {x, y} + cond
    submatrix, which is algebraically identical to the residual form in
    :func:`partial_correlation` but turns each test into O(|cond|^3)
    instead of a fresh regression. PC runs and triple sweeps over one
    dataset go through this.
    """

    def __init__(self, data):
        data = _as_matrix(data)
        self.n_rows = data.shape[0]
        stds = data.std(axis=0)
        if np.any(stds == 0.0):
            raise DegenerateDataError("constant column in data")
        self.corr = np.corrcoef(data, rowvar=False)

    def partial_corr(self, x: int, y: int, cond: Sequence[int]) -> float:
        cols = [x, y, *cond]
        sub = self.corr[np.ix_(cols, cols)]
        try:
            omega = np.linalg.inv(sub)
        except np.linalg.LinAlgError as exc:
            raise DegenerateDataError("singular correlation submatrix") from exc
        denom = np.sqrt(omega[0, 0] * omega[1, 1])
        return float(np.clip(-omega[0, 1] / denom, -1.0, 1.0))

    def fisher_z(self, x: int, y: int, cond: Iterable[int], alpha: float) -> TestResult:
        cond = sorted(set(cond))
        if self.n_rows <= len(cond) + 3:
            raise ParameterError("too few rows for this conditioning-set size")
        rho = self.partial_corr(x, y, cond)
        return _fisher_z_from_rho(rho, self.n_rows, len(cond), alpha)


def ols_fit(X, y) -> RegressionFit:
    """Least squares of y on [1, X]; X may have zero columns."""
    y = np.asarray(y, dtype=float).ravel()
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != y.shape[0]:
        raise ParameterError("X and y row counts differ")
    design = np.column_stack([np.ones(y.shape[0]), X])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise DegenerateDataError("design matrix is rank deficient")
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - design @ beta
    return RegressionFit(beta, residuals, float(residuals @ residuals))


def poly_features(x: np.ndarray, degree: int, mean: float, std: float) -> np.ndarray:
    xs = (np.asarray(x, dtype=float) - mean) / std
    return np.column_stack([xs**d for d in range(1, degree + 1)])


def poly_regress(x, y, degree: int) -> RegressionFit:
    """Polynomial least squares on internally standardized x."""
    if not (1 <= degree <= 5):
        raise ParameterError("degree must be between 1 and 5")
    x = np.asarray(x, dtype=float).ravel()
    std = float(np.std(x))
    if std == 0.0:
        raise DegenerateDataError("x is constant")
    return ols_fit(poly_features(x, degree, float(np.mean(x)), std), y)


# --- kernel independence ---------------------------------------------------


def _subsample(n: int, cap: int) -> np.ndarray:
    """Deterministic evenly spaced row selection (rows are i.i.d. anyway)."""
    if n <= cap:
        return np.arange(n)
    return np.linspace(0, n - 1, cap).astype(int)


def _gaussian_kernel(v: np.ndarray) -> np.ndarray:
    if v.ndim == 1:
        v = v[:, None]
    sq = np.sum(v * v, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (v @ v.T)
    np.maximum(d2, 0.0, out=d2)
    positive = d2[d2 > 0]
    if positive.size == 0:
        raise DegenerateDataError("all points identical; kernel bandwidth undefined")
    width2 = 0.5 * float(np.median(positive))
    return np.exp(-d2 / (2.0 * width2))


def _hsic_parts(x: np.ndarray, y: np.ndarray):
    n = x.shape[0]
    K = _gaussian_kernel(x)
    L = _gaussian_kernel(y)
    H = np.eye(n) - np.full((n, n), 1.0 / n)
    Kc = H @ K @ H
    Lc = H @ L @ H
    stat = float(np.sum(Kc * Lc)) / n
    return K, L, Kc, Lc, stat


def hsic_statistic(x, y, max_samples: int = HSIC_MAX_SAMPLES) -> float:
    """Biased HSIC estimate with median-heuristic Gaussian kernels."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape[0] != y.shape[0]:
        raise ParameterError("x and y lengths differ")
    idx = _subsample(x.shape[0], max_samples)
    *_, stat = _hsic_parts(x[idx], y[idx])
    return stat


def hsic_test(x, y, alpha: float) -> TestResult:
    """HSIC independence test, gamma approximation of the null.

    Inputs above 1000 points are subsampled (kernel tests are quadratic in
    the sample size).
    """
    if not (0.0 < alpha < 1.0):
        raise ParameterError("alpha must be in (0, 1)")
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape[0] != y.shape[0]:
        raise ParameterError("x and y lengths differ")
    if x.shape[0] < 50:
        raise ParameterError("need at least 50 samples")
    idx = _subsample(x.shape[0], HSIC_MAX_SAMPLES)
    xs, ys = x[idx], y[idx]
    n = xs.shape[0]
    K, L, Kc, Lc, stat = _hsic_parts(xs, ys)

    # Gamma null: moments of the biased statistic under independence.
    var = ((Kc * Lc / 6.0) ** 2).sum() - np.trace((Kc * Lc / 6.0) ** 2)
    var = var / n / (n - 1) * 72.0 * (n - 4) * (n - 5) / (n * (n - 1) * (n - 2) * (n - 3))
    K0 = K - np.diag(np.diag(K))
    L0 = L - np.diag(np.diag(L))
    mu_x = K0.sum() / (n * (n - 1))
    mu_y = L0.sum() / (n * (n - 1))
    mean = (1.0 + mu_x * mu_y - mu_x - mu_y) / n
    if var <= 0 or mean <= 0:
        raise DegenerateDataError("degenerate kernel matrices in HSIC null moments")
    shape = mean**2 / var
    scale = var / mean * n
    p = float(gamma_dist.sf(stat, a=shape, scale=scale))
    return TestResult(statistic=stat, p_value=p, independent=p > alpha)


def kci_test(data, x: int, y: int, cond: Iterable[int], alpha: float) -> TestResult:
    """Kernel conditional independence test, gamma-approximated null.

    Kernel features of x and y are residualized on the conditioning set by
    kernel ridge regression; the statistic is the HSIC-style cross product
    of the residualized kernels. With an empty conditioning set this is
    exactly :func:`hsic_test`. Rows are capped at 1000.
    """
    data = _as_matrix(data)
    cond = sorted(set(cond))
    _check_columns(data, x, y, cond)
    if data.shape[0] < 100:
        raise ParameterError("need at least 100 rows")
    if not cond:
        return hsic_test(data[:, x], data[:, y], alpha)

    idx = _subsample(data.shape[0], KCI_MAX_SAMPLES)
    n = idx.shape[0]

    def standardized(col) -> np.ndarray:
        v = data[idx, col]
        s = np.std(v)
        if s == 0.0:
            raise DegenerateDataError(f"column {col} is constant")
        return (v - np.mean(v)) / s

    xv = standardized(x)
    yv = standardized(y)
    Z = np.column_stack([standardized(c) for c in cond])

    # The x-side kernel sees the conditioning set too (at half weight), the
    # standard trick to keep power when x depends strongly on z.
    Kx = _gaussian_kernel(np.column_stack([xv, 0.5 * Z]))
    Ky = _gaussian_kernel(yv)
    Kz = _gaussian_kernel(Z)

    H = np.eye(n) - np.full((n, n), 1.0 / n)
    Kxc = H @ Kx @ H
    Kyc = H @ Ky @ H
    Kzc = H @ Kz @ H

    eps = 1e-3
    Rz = eps * np.linalg.inv(Kzc + eps * np.eye(n))
    KxR = Rz @ Kxc @ Rz.T
    KyR = Rz @ Kyc @ Rz.T

    stat = float(np.sum(KxR * KyR))
    mean = np.trace(KxR) * np.trace(KyR) / n
    var = 2.0 * float(np.sum(KxR * KxR)) * float(np.sum(KyR * KyR)) / n / n
    if var <= 0 or mean <= 0:
        raise DegenerateDataError("degenerate kernel matrices in KCI null moments")
    p = float(gamma_dist.sf(stat, a=mean**2 / var, scale=var / mean))
    return TestResult(statistic=stat, p_value=p, independent=p > alpha)


# --- ROC / AUC --------------------------------------------------------------


def roc_auc(labels, scores) -> tuple[float, list[tuple[float, float]]]:
    """Trapezoidal AUC with tied scores averaged (Mann-Whitney convention).

    Higher scores are treated as evidence for the positive (True) label.
    Returns the AUC and the ROC polyline as (fpr, tpr) points.
    """
    labels = np.asarray(labels, dtype=bool).ravel()
    scores = np.asarray(scores, dtype=float).ravel()
    if labels.shape[0] != scores.shape[0]:
        raise ParameterError("labels and scores lengths differ")
    n_pos = int(labels.sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DomainError("both classes must be present")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    l = labels[order]
    tp = np.cumsum(l)
    fp = np.cumsum(~l)
    # Keep one ROC vertex per distinct score (the last row of a tie block).
    last_of_block = np.append(s[1:] != s[:-1], True)
    tpr = np.concatenate([[0.0], tp[last_of_block] / n_pos])
    fpr = np.concatenate([[0.0], fp[last_of_block] / n_neg])
    auc = float(np.trapezoid(tpr, fpr))
    return auc, list(zip(fpr.tolist(), tpr.tolist()))

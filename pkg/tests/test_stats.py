import numpy as np
import pytest
from scipy.stats import kstest

from scmbench.errors import DegenerateDataError, DomainError, ParameterError
from scmbench.stats import (
    CorrelationCache,
    fisher_z_test,
    hsic_statistic,
    hsic_test,
    kci_test,
    ols_fit,
    partial_correlation,
    poly_regress,
    roc_auc,
)

from oracles import auc_pairwise_oracle


class TestPartialCorrelation:
    def test_empty_cond_equals_pearson(self):
        rng = np.random.default_rng(0)
        data = rng.normal(size=(500, 2))
        expected = np.corrcoef(data[:, 0], data[:, 1])[0, 1]
        assert partial_correlation(data, 0, 1) == pytest.approx(expected, abs=1e-12)

    def test_chain_partial_correlation_vanishes(self):
        rng = np.random.default_rng(1)
        n = 15_000
        x = rng.normal(size=n)
        y = 1.2 * x + 0.6 * rng.normal(size=n)
        z = -0.9 * y + 0.5 * rng.normal(size=n)
        data = np.column_stack([x, y, z])
        assert abs(partial_correlation(data, 0, 2, [1])) < 0.02

    def test_additive_noise_analytic_value(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=15_000)
        y = x + rng.normal(size=15_000)
        data = np.column_stack([x, y])
        assert partial_correlation(data, 0, 1) == pytest.approx(1 / np.sqrt(2), abs=0.01)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(3)
        data = rng.normal(size=(300, 4))
        assert partial_correlation(data, 0, 1, [2, 3]) == partial_correlation(data, 1, 0, [2, 3])

    def test_constant_column_raises(self):
        data = np.column_stack([np.ones(100), np.arange(100.0)])
        with pytest.raises(DegenerateDataError):
            partial_correlation(data, 0, 1)

    def test_too_few_rows(self):
        with pytest.raises(ParameterError):
            partial_correlation(np.random.default_rng(0).normal(size=(5, 4)), 0, 1, [2, 3])


class TestFisherZ:
    def test_zero_rho_gives_p_one(self):
        # Two exactly uncorrelated columns by construction.
        x = np.array([1.0, -1.0, 1.0, -1.0] * 50)
        y = np.array([1.0, 1.0, -1.0, -1.0] * 50)
        res = fisher_z_test(np.column_stack([x, y]), 0, 1, [], alpha=0.05)
        assert res.statistic == 0.0
        assert res.p_value == 1.0
        assert res.independent

    def test_perfect_correlation(self):
        x = np.linspace(0, 1, 200)
        res = fisher_z_test(np.column_stack([x, 2 * x]), 0, 1, [], alpha=0.05)
        assert res.p_value < 1e-10
        assert not res.independent

    def test_null_rejection_rate_and_uniformity(self):
        rng = np.random.default_rng(4)
        p_values = []
        for _ in range(1000):
            data = rng.normal(size=(15_000, 2))
            p_values.append(fisher_z_test(data, 0, 1, [], alpha=0.05).p_value)
        p_values = np.asarray(p_values)
        rate = float(np.mean(p_values <= 0.05))
        assert 0.03 <= rate <= 0.07
        assert kstest(p_values, "uniform").statistic < 0.05

    def test_alpha_validation(self):
        with pytest.raises(ParameterError):
            fisher_z_test(np.random.default_rng(0).normal(size=(50, 2)), 0, 1, [], alpha=0.0)


class TestCorrelationCache:
    def test_matches_regression_form(self):
        rng = np.random.default_rng(5)
        data = rng.normal(size=(2_000, 5))
        data[:, 3] += 0.8 * data[:, 0]
        cache = CorrelationCache(data)
        for cond in ([], [2], [2, 4], [1, 2, 4]):
            direct = partial_correlation(data, 0, 3, cond)
            assert cache.partial_corr(0, 3, cond) == pytest.approx(direct, abs=1e-10)


class TestOls:
    def test_exact_line(self):
        x = np.linspace(-2, 3, 50)
        fit = ols_fit(x, 2 * x + 1)
        assert np.allclose(fit.coefficients, [1.0, 2.0], atol=1e-10)
        assert fit.rss < 1e-10

    def test_intercept_only(self):
        rng = np.random.default_rng(6)
        y = rng.normal(size=80)
        fit = ols_fit(np.zeros((80, 0)), y)
        assert np.allclose(fit.residuals, y - y.mean(), atol=1e-12)

    def test_residuals_orthogonal_and_centered(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(400, 3))
        y = X @ np.array([1.0, -2.0, 0.5]) + rng.normal(size=400)
        fit = ols_fit(X, y)
        assert abs(fit.residuals.mean()) < 1e-10
        for j in range(3):
            assert abs(fit.residuals @ X[:, j]) / np.linalg.norm(X[:, j]) < 1e-8

    def test_rank_deficiency(self):
        X = np.column_stack([np.arange(50.0), 2 * np.arange(50.0)])
        with pytest.raises(DegenerateDataError):
            ols_fit(X, np.arange(50.0))


class TestPolyRegress:
    def test_quadratic_exact(self):
        x = np.linspace(-2, 2, 60)
        fit = poly_regress(x, x**2, degree=2)
        assert fit.rss < 1e-8

    def test_degree_one_matches_ols_after_destandardization(self):
        rng = np.random.default_rng(8)
        x = rng.normal(2.0, 3.0, 500)
        y = -1.5 * x + rng.normal(size=500)
        pfit = poly_regress(x, y, degree=1)
        ofit = ols_fit(x, y)
        m, s = x.mean(), x.std()
        slope = pfit.coefficients[1] / s
        intercept = pfit.coefficients[0] - pfit.coefficients[1] * m / s
        assert slope == pytest.approx(ofit.coefficients[1], abs=1e-10)
        assert intercept == pytest.approx(ofit.coefficients[0], abs=1e-10)

    def test_sigmoid_curve_fit_quality(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=5_000)
        y = 1 / (1 + np.exp(-2 * x)) + 0.01 * rng.normal(size=5_000)
        fit = poly_regress(x, y, degree=3)
        r2 = 1 - fit.rss / np.sum((y - y.mean()) ** 2)
        assert r2 > 0.95

    def test_degree_bounds(self):
        with pytest.raises(ParameterError):
            poly_regress(np.arange(10.0), np.arange(10.0), degree=6)


class TestHsic:
    def test_null_calibration(self):
        rejections = 0
        for s in range(500):
            rng = np.random.default_rng(10_000 + s)
            res = hsic_test(rng.normal(size=500), rng.normal(size=500), alpha=0.05)
            rejections += not res.independent
        assert 0.02 <= rejections / 500 <= 0.09

    def test_identity_is_detected(self):
        rng = np.random.default_rng(10)
        x = rng.normal(size=600)
        assert hsic_test(x, x, alpha=0.05).p_value < 1e-6

    def test_nonlinear_dependence_with_zero_correlation(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=1_000)
        res = hsic_test(x, x**2, alpha=0.05)
        assert res.p_value < 0.01

    def test_statistic_symmetry(self):
        rng = np.random.default_rng(12)
        x, y = rng.normal(size=700), rng.normal(size=700)
        assert hsic_statistic(x, y) == hsic_statistic(y, x)

    def test_constant_input_raises(self):
        with pytest.raises(DegenerateDataError):
            hsic_test(np.ones(200), np.arange(200.0), alpha=0.05)

    def test_small_sample_rejected(self):
        with pytest.raises(ParameterError):
            hsic_test(np.arange(10.0), np.arange(10.0), alpha=0.05)


class TestKci:
    def test_empty_cond_matches_hsic_decision(self):
        agree = 0
        for s in range(100):
            rng = np.random.default_rng(20_000 + s)
            x = rng.normal(size=200)
            y = 0.2 * x * (s % 2) + rng.normal(size=200)
            data = np.column_stack([x, y])
            k = kci_test(data, 0, 1, [], alpha=0.05)
            h = hsic_test(x, y, alpha=0.05)
            agree += k.independent == h.independent
        assert agree >= 95

    def test_sigmoid_chain_calibration(self):
        # X -> Y -> Z with sigmoid mechanisms at the family's parameter
        # bounds; conditional test should accept, marginal should reject.
        accept_cond = 0
        reject_marg = 0
        n_seeds = 50
        for s in range(n_seeds):
            rng = np.random.default_rng(s)
            x = rng.normal(0, 0.8, 1000)
            y = 2.0 / (1 + np.exp(-x)) + rng.normal(0, 0.4, 1000)
            z = 2.0 / (1 + np.exp(-y)) + rng.normal(0, 0.4, 1000)
            data = np.column_stack([x, y, z])
            accept_cond += kci_test(data, 0, 2, [1], 0.05).independent
            reject_marg += not kci_test(data, 0, 2, [], 0.05).independent
        assert accept_cond / n_seeds >= 0.80
        assert reject_marg / n_seeds >= 0.90

    def test_row_minimum(self):
        with pytest.raises(ParameterError):
            kci_test(np.random.default_rng(0).normal(size=(50, 3)), 0, 1, [2], 0.05)


class TestRocAuc:
    def test_perfect_ranking(self):
        auc, points = roc_auc([True, False], [0.9, 0.1])
        assert auc == 1.0
        assert points[0] == (0.0, 0.0) and points[-1] == (1.0, 1.0)

    def test_all_ties_give_half(self):
        auc, _ = roc_auc([True, False, True, False], [0.5, 0.5, 0.5, 0.5])
        assert auc == pytest.approx(0.5, abs=1e-12)

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(13)
        labels = rng.random(200) < 0.4
        labels[0], labels[1] = True, False
        scores = np.round(rng.random(200), 2)  # rounding forces ties
        auc, _ = roc_auc(labels, scores)
        assert auc == pytest.approx(auc_pairwise_oracle(labels, scores), abs=1e-12)

    def test_score_negation_identity(self):
        rng = np.random.default_rng(14)
        labels = rng.random(150) < 0.5
        labels[0], labels[1] = True, False
        scores = rng.normal(size=150)
        a1, _ = roc_auc(labels, scores)
        a2, _ = roc_auc(labels, -scores)
        assert a1 + a2 == pytest.approx(1.0, abs=1e-12)

    def test_single_class_is_domain_error(self):
        with pytest.raises(DomainError):
            roc_auc([True, True], [0.1, 0.2])

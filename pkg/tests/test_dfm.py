import numpy as np
import pytest

from nowcast.errors import DataError, NumericalError
from nowcast.metrics import rmse
from nowcast.models.dfm import dfm_nowcast, extract_factors, fit_dfm, fit_var1
from nowcast.models.linear import fit_ols
from nowcast.series import seasonal_adjust_lite, yoy_growth


def standardized(X):
    return (X - X.mean(axis=0)) / X.std(axis=0)


class TestExtractFactors:
    def test_rank_one_exact(self):
        rng = np.random.default_rng(0)
        u = rng.normal(size=50)
        v = rng.normal(size=6)
        X = np.outer(u, v)
        X = X - X.mean(axis=0)  # keep zero mean without rescaling rank
        loadings, factors = extract_factors(X, r=1)
        np.testing.assert_allclose(factors @ loadings.T, X, atol=1e-9)

    def test_full_rank_exact(self):
        rng = np.random.default_rng(1)
        X = standardized(rng.normal(size=(40, 5)))
        loadings, factors = extract_factors(X, r=5)
        np.testing.assert_allclose(factors @ loadings.T, X, atol=1e-9)

    def test_reconstruction_error_nonincreasing_in_r(self):
        rng = np.random.default_rng(2)
        X = standardized(rng.normal(size=(60, 8)))
        errs = []
        for r in range(1, 9):
            loadings, factors = extract_factors(X, r)
            errs.append(float(np.linalg.norm(X - factors @ loadings.T)))
        assert all(b <= a + 1e-9 for a, b in zip(errs[:-1], errs[1:]))

    def test_factor_moments(self):
        rng = np.random.default_rng(3)
        X = standardized(rng.normal(size=(80, 6)))
        _, factors = extract_factors(X, r=3)
        np.testing.assert_allclose(factors.mean(axis=0), 0.0, atol=1e-10)
        cov = factors.T @ factors / (len(factors) - 1)
        np.testing.assert_allclose(cov, np.eye(3), atol=1e-10)

    def test_sign_convention(self):
        rng = np.random.default_rng(4)
        X = standardized(rng.normal(size=(50, 4)))
        loadings, _ = extract_factors(X, r=2)
        for k in range(2):
            lead = np.argmax(np.abs(loadings[:, k]))
            assert loadings[lead, k] > 0

    def test_r_out_of_range(self):
        with pytest.raises(DataError, match="out of range"):
            extract_factors(np.zeros((10, 3)), r=4)

    def test_recovers_latent_activity(self, economy, store_and_payments):
        """One dominant activity factor: |factor 1| tracks |latent|."""
        store, payments = store_and_payments
        cols = []
        for name in payments:
            if not name.endswith("_value"):
                continue
            adj = seasonal_adjust_lite(store.series_asof(name), store.series_asof(name).end)
            cols.append(yoy_growth(adj))
        start = max(c.start for c in cols)
        end = min(c.end for c in cols)
        X = np.column_stack([c.values[start - c.start : end - c.start + 1] for c in cols])
        _, factors = extract_factors(standardized(X), r=1)
        latent = economy.truth.activity
        a = latent.values[start - latent.start : end - latent.start + 1]
        corr = np.corrcoef(np.abs(factors[:, 0]), np.abs(a))[0, 1]
        assert corr > 0.95


class TestVar1:
    def test_simulate_and_recover(self):
        rng = np.random.default_rng(5)
        A = np.array([[0.6, 0.2], [-0.1, 0.5]])
        f = np.zeros((8100, 2))
        for t in range(1, 8100):
            f[t] = A @ f[t - 1] + rng.normal(scale=0.02, size=2)
        A_hat = fit_var1(f[100:])  # drop burn-in
        assert np.linalg.norm(A_hat - A, "fro") < 0.05

    def test_white_noise_coefficients_small(self):
        rng = np.random.default_rng(6)
        f = rng.normal(size=(200, 2))
        A_hat = fit_var1(f)
        assert np.abs(A_hat).max() < 3.0 / np.sqrt(200)

    def test_constant_factors_singular(self):
        f = np.ones((30, 2))
        with pytest.raises(NumericalError, match="singular"):
            fit_var1(f)


class TestNowcast:
    def test_exact_linear_function_of_factor(self):
        rng = np.random.default_rng(7)
        X = standardized(rng.normal(size=(60, 5)))
        loadings, factors = extract_factors(X, r=2)
        y = 3.0 * factors[:, 0] + 1.0
        fit = fit_dfm(X, y, r=2)
        np.testing.assert_allclose(dfm_nowcast(fit, X), y, atol=1e-8)

    def test_extra_factors_change_little_on_one_factor_data(self):
        rng = np.random.default_rng(8)
        n = 120
        latent = np.cumsum(rng.normal(size=n)) * 0.1
        X = np.outer(latent, rng.uniform(0.5, 1.5, size=8))
        X = X + rng.normal(scale=0.3, size=X.shape)
        y = latent + rng.normal(scale=0.2, size=n)
        train, test = np.arange(90), np.arange(90, n)
        preds = {}
        for r in (2, 4):
            fit = fit_dfm(X[train], y[train], r=r)
            preds[r] = rmse(dfm_nowcast(fit, X[test]), y[test])
        assert abs(preds[2] - preds[4]) <= 0.10 * min(preds[2], preds[4])

    def test_beats_ols_benchmark_on_crisis_data(self, default_frame):
        """Payments-aware factor model vs the no-payments OLS benchmark."""
        frame = default_frame
        n_test = 24
        train = np.arange(len(frame) - n_test)
        test = np.arange(len(frame) - n_test, len(frame))
        fit = fit_dfm(frame.X[train], frame.y[train], r=2)
        dfm_rmse = rmse(dfm_nowcast(fit, frame.X[test]), frame.y[test])

        bench_cols = [
            i for i, n in enumerate(frame.feature_names) if n not in frame.payment_features
        ]
        ols = fit_ols(frame.X[train][:, bench_cols], frame.y[train])
        ols_rmse = rmse(ols.predict(frame.X[test][:, bench_cols]), frame.y[test])
        assert dfm_rmse < ols_rmse

    def test_spectral_radius_warning(self):
        rng = np.random.default_rng(9)
        n = 60
        trend = np.exp(0.12 * np.arange(n))  # explosive common factor
        X = np.outer(trend, np.ones(4)) + rng.normal(scale=0.02 * trend[:, None], size=(n, 4))
        with pytest.warns(UserWarning, match="spectral radius"):
            fit_dfm(X, trend, r=2)

import numpy as np
import pytest

from nowcast.errors import DataError
from nowcast.models.svr import fit_svr, kernel_matrix, svr_dual_objective


def standardized(X):
    return (X - X.mean(axis=0)) / X.std(axis=0)


def cvxopt_dual_oracle(X, y, C, eps, kernel="linear", degree=2, gamma=None):
    """Dense QP solve of the epsilon-SVR dual in (alpha, alpha*) variables."""
    from cvxopt import matrix, solvers

    n = X.shape[0]
    if gamma is None:
        gamma = 1.0 / X.shape[1]
    K = kernel_matrix(X, X, kernel, degree, gamma)
    P = np.block([[K, -K], [-K, K]])
    P = P + 1e-10 * np.eye(2 * n)  # PSD jitter for the IP solver
    q = np.concatenate([eps - y, eps + y])
    G = np.vstack([-np.eye(2 * n), np.eye(2 * n)])
    h = np.concatenate([np.zeros(2 * n), np.full(2 * n, C)])
    A = np.concatenate([np.ones(n), -np.ones(n)])[None, :]
    solvers.options["show_progress"] = False
    solvers.options["abstol"] = 1e-12
    solvers.options["reltol"] = 1e-12
    sol = solvers.qp(matrix(P), matrix(q), matrix(G), matrix(h), matrix(A), matrix([0.0]))
    z = np.array(sol["x"]).ravel()
    beta = z[:n] - z[n:]
    return beta, svr_dual_objective(K, y, beta, eps)


class TestTubeInterior:
    def test_targets_inside_tube_give_zero_duals(self):
        rng = np.random.default_rng(0)
        X = standardized(rng.normal(size=(20, 2)))
        y = 0.5 + rng.uniform(-0.2, 0.2, size=20)  # inside an eps=0.3 tube of a constant
        fit = fit_svr(X, y, C=100.0, eps=0.3, kernel="linear")
        np.testing.assert_array_equal(fit.beta, 0.0)
        pred = fit.predict(X)
        assert np.max(np.abs(pred - y)) <= 0.3 + 1e-8  # zero epsilon-insensitive loss
        assert 0.3 <= fit.bias <= 0.7


class TestQpOracle:
    def test_dual_objective_matches_cvxopt_linear(self):
        rng = np.random.default_rng(1)
        X = standardized(rng.normal(size=(10, 2)))
        y = X @ np.array([1.0, -0.5]) + rng.normal(scale=0.3, size=10)
        C, eps = 2.0, 0.2
        fit = fit_svr(X, y, C=C, eps=eps, kernel="linear", tol=1e-10)
        _, obj_oracle = cvxopt_dual_oracle(X, y, C, eps, kernel="linear")
        assert fit.dual_objective == pytest.approx(obj_oracle, abs=1e-4)

    def test_dual_objective_matches_cvxopt_rbf(self):
        rng = np.random.default_rng(2)
        X = standardized(rng.normal(size=(10, 2)))
        y = np.sin(X[:, 0]) + rng.normal(scale=0.2, size=10)
        C, eps = 3.0, 0.1
        fit = fit_svr(X, y, C=C, eps=eps, kernel="rbf", tol=1e-10)
        _, obj_oracle = cvxopt_dual_oracle(X, y, C, eps, kernel="rbf", gamma=0.5)
        fit2 = fit_svr(X, y, C=C, eps=eps, kernel="rbf", gamma=0.5, tol=1e-10)
        assert fit2.dual_objective == pytest.approx(obj_oracle, abs=1e-4)


class TestDualFeasibility:
    def test_box_and_sum_constraints_at_exit(self):
        rng = np.random.default_rng(3)
        X = standardized(rng.normal(size=(30, 3)))
        y = X @ np.array([1.0, 0.3, -0.7]) + rng.normal(scale=0.4, size=30)
        C = 1.5
        fit = fit_svr(X, y, C=C, eps=0.1, kernel="rbf")
        assert np.all(np.abs(fit.beta) <= C + 1e-9)
        assert abs(fit.beta.sum()) < 1e-9
        assert fit.kkt_violation < 1e-6

    def test_kkt_violation_reported_below_tol(self):
        rng = np.random.default_rng(4)
        X = standardized(rng.normal(size=(25, 2)))
        y = rng.normal(size=25)
        fit = fit_svr(X, y, C=3.0, eps=0.3, kernel="rbf", tol=1e-8)
        assert fit.kkt_violation < 1e-8


class TestDeterminismAndErrors:
    def test_no_rng_determinism(self):
        rng = np.random.default_rng(5)
        X = standardized(rng.normal(size=(40, 4)))
        y = rng.normal(size=40)
        a = fit_svr(X, y, C=3.0, eps=0.3, kernel="rbf", degree=2)
        b = fit_svr(X, y, C=3.0, eps=0.3, kernel="rbf", degree=2)
        np.testing.assert_array_equal(a.beta, b.beta)
        assert a.bias == b.bias
        np.testing.assert_array_equal(a.predict(X), b.predict(X))

    def test_bad_gamma_rejected(self):
        rng = np.random.default_rng(6)
        X = standardized(rng.normal(size=(10, 2)))
        with pytest.raises(DataError, match="gamma"):
            fit_svr(X, rng.normal(size=10), kernel="rbf", gamma=-1.0)

    def test_poly_kernel_runs(self):
        rng = np.random.default_rng(7)
        X = standardized(rng.normal(size=(15, 2)))
        y = X[:, 0] ** 2 + rng.normal(scale=0.1, size=15)
        fit = fit_svr(X, y, C=5.0, eps=0.05, kernel="poly", degree=2)
        assert np.isfinite(fit.predict(X)).all()

    def test_non_standardized_rejected(self):
        rng = np.random.default_rng(8)
        with pytest.raises(DataError, match="standardized"):
            fit_svr(rng.normal(loc=5.0, size=(10, 2)), rng.normal(size=10))

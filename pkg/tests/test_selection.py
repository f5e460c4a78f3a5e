import numpy as np
import pytest
from scipy import stats

from nowcast.errors import DataError
from nowcast.selection import F_CAP, fscore, select_k_best


class TestFscore:
    def test_hand_arithmetic(self):
        """r = 0.5, n = 22 -> F = (0.25/0.75) * 20 = 6.667 (formula check)."""
        # construct two columns with exact sample correlation 0.5
        n = 22
        rng = np.random.default_rng(0)
        a = rng.normal(size=n)
        b = rng.normal(size=n)
        a = (a - a.mean()) / a.std()
        b = b - b.mean()
        b -= a * (a @ b) / (a @ a)  # b now orthogonal to a
        b /= b.std()
        r = 0.5
        y = r * a + np.sqrt(1 - r * r) * b
        F, p = fscore(a, y)
        assert F == pytest.approx(0.25 / 0.75 * 20, abs=1e-9)
        assert p == pytest.approx(float(stats.f.sf(F, 1, 20)), abs=1e-15)

    def test_perfect_correlation_capped(self):
        x = np.arange(10.0)
        F, p = fscore(x, 3.0 * x + 1.0)
        assert F == F_CAP
        assert p == 0.0

    def test_constant_column_rejected(self):
        with pytest.raises(DataError, match="constant"):
            fscore(np.ones(10), np.arange(10.0))

    def test_too_short(self):
        with pytest.raises(DataError, match="n >= 3"):
            fscore(np.array([1.0, 2.0]), np.array([1.0, 2.0]))

    def test_p_values_uniform_under_null(self):
        """independent normals: p should be U(0,1) across 500 seeded trials."""
        ps = []
        for seed in range(500):
            rng = np.random.default_rng(seed)
            x = rng.normal(size=200)
            y = rng.normal(size=200)
            ps.append(fscore(x, y)[1])
        ks = stats.kstest(ps, "uniform")
        assert ks.pvalue > 0.01


class TestSelectKBest:
    def test_k_equals_m_keeps_everything(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(50, 6))
        y = rng.normal(size=50)
        np.testing.assert_array_equal(select_k_best(X, y, 6), np.arange(6))

    def test_duplicate_of_target_wins(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(40, 5))
        y = rng.normal(size=40)
        X[:, 3] = y
        np.testing.assert_array_equal(select_k_best(X, y, 1), [3])

    def test_matches_brute_force_sort(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(60, 8))
        y = X @ rng.normal(size=8) + rng.normal(size=60)
        scores = [fscore(X[:, j], y)[0] for j in range(8)]
        for k in (1, 3, 8):
            expected = sorted(
                sorted(range(8), key=lambda j: (-scores[j], j))[:k]
            )
            np.testing.assert_array_equal(select_k_best(X, y, k), expected)

    def test_tie_broken_by_lower_index(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=30)
        y = x + rng.normal(scale=0.5, size=30)
        X = np.column_stack([x, x.copy(), rng.normal(size=30)])  # cols 0,1 tie exactly
        np.testing.assert_array_equal(select_k_best(X, y, 1), [0])

    def test_k_out_of_range(self):
        X = np.random.default_rng(5).normal(size=(20, 3))
        y = np.random.default_rng(6).normal(size=20)
        with pytest.raises(DataError, match="out of range"):
            select_k_best(X, y, 0)
        with pytest.raises(DataError, match="out of range"):
            select_k_best(X, y, 4)

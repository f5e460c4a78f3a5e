import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nowcast.errors import DataError
from nowcast.metrics import (
    display_reduction,
    dm_test,
    rmse,
    rmse_reduction,
    split_eval,
)


class TestRmse:
    def test_perfect_prediction(self):
        assert rmse([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_constant_errors(self):
        assert rmse(np.zeros(5) + 3.0, np.zeros(5)) == pytest.approx(3.0)
        assert rmse(np.zeros(5) - 2.0, np.zeros(5)) == pytest.approx(2.0)

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(0)
        p, a = rng.normal(size=24), rng.normal(size=24)
        total = 0.0
        for x, y in zip(p, a):
            total += (x - y) ** 2
        assert rmse(p, a) == pytest.approx(np.sqrt(total / 24), abs=1e-12)

    def test_errors(self):
        with pytest.raises(DataError, match="empty"):
            rmse([], [])
        with pytest.raises(DataError, match="mismatch"):
            rmse([1.0], [1.0, 2.0])

    @given(st.floats(min_value=-50, max_value=50).filter(lambda c: abs(c) > 1e-6),
           st.integers(0, 2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_scale_equivariance(self, c, seed):
        rng = np.random.default_rng(seed)
        p, a = rng.normal(size=10), rng.normal(size=10)
        assert rmse(c * p, c * a) == pytest.approx(abs(c) * rmse(p, a), rel=1e-9)


class TestReduction:
    def test_reported_t1_gdp_value(self):
        """benchmark 3.97 vs main 2.43 -> displays 39."""
        assert display_reduction(rmse_reduction(3.97, 2.43)) == 39

    def test_reported_t_gdp_value(self):
        """benchmark 4.58 vs main 3.70 -> displays 19."""
        assert display_reduction(rmse_reduction(4.58, 3.70)) == 19

    def test_equal_models_zero(self):
        assert rmse_reduction(2.5, 2.5) == 0.0

    def test_nonpositive_baseline_rejected(self):
        with pytest.raises(DataError, match="baseline"):
            rmse_reduction(0.0, 1.0)


class TestDmTest:
    def test_identical_series_sentinel(self):
        e = np.random.default_rng(0).normal(size=20)
        out = dm_test(e, e.copy())
        assert out.indistinguishable
        assert out.p_value == 1.0

    def test_uniformly_worse_detected(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=100)
        b = a + np.sign(a) * 1.0  # every |b| = |a| + 1 -> larger squared loss
        out = dm_test(a, b)
        assert out.statistic < 0  # negative favors the first series
        assert out.p_value < 0.01

    def test_antisymmetric(self):
        rng = np.random.default_rng(2)
        a, b = rng.normal(size=50), rng.normal(size=50) * 1.3
        ab = dm_test(a, b)
        ba = dm_test(b, a)
        assert ab.statistic == pytest.approx(-ba.statistic, abs=1e-12)
        assert ab.p_value == pytest.approx(ba.p_value, abs=1e-12)

    def test_size_close_to_nominal(self):
        """equal-accuracy null at T=100: two-sided 10% test rejects ~10%."""
        rejections = 0
        trials = 500
        for seed in range(trials):
            rng = np.random.default_rng(seed)
            a = rng.normal(size=100)
            b = rng.normal(size=100)
            if dm_test(a, b).p_value < 0.10:
                rejections += 1
        assert 0.06 <= rejections / trials <= 0.14

    def test_absolute_loss_supported(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=50)
        out = dm_test(a, a * 2.0, loss="absolute")
        assert out.statistic < 0

    def test_short_series_rejected(self):
        with pytest.raises(DataError, match=">= 8"):
            dm_test(np.ones(5), np.zeros(5))

    def test_hln_correction_applied(self):
        """h > 1 must rescale the statistic by the HLN factor."""
        rng = np.random.default_rng(4)
        a, b = rng.normal(size=60), rng.normal(size=60) * 1.5
        t1 = dm_test(a, b, h=1).statistic
        # recompute h=3 by hand from the same d series
        d = a * a - b * b
        T = 60
        dbar = d.mean()
        dc = d - dbar
        lrv = float(dc @ dc) / T
        for j in range(1, 3):
            lrv += 2.0 * (1.0 - j / 3) * float(dc[j:] @ dc[:-j]) / T
        stat = dbar / np.sqrt(lrv / T)
        hln = np.sqrt((T + 1 - 2 * 3 + 3 * 2 / T) / T)
        assert dm_test(a, b, h=3).statistic == pytest.approx(hln * stat, abs=1e-12)
        assert t1 != pytest.approx(dm_test(a, b, h=3).statistic)


class TestSplitEval:
    def test_single_regime_equals_plain_rmse(self):
        rng = np.random.default_rng(5)
        p, a = rng.normal(size=10), rng.normal(size=10)
        months = list(range(24000, 24010))
        out = split_eval(p, a, months, {"normal": set(months)})
        assert out["all"].rmse == pytest.approx(rmse(p, a))
        assert out["normal"].rmse == pytest.approx(rmse(p, a))

    def test_pooling_identity_equal_counts(self):
        """two regimes, RMSE 3 and 4 with equal counts -> overall sqrt(12.5)."""
        months = list(range(24000, 24004))
        pred = np.array([3.0, -3.0, 4.0, -4.0])
        actual = np.zeros(4)
        regimes = {"a": {24000, 24001}, "b": {24002, 24003}}
        out = split_eval(pred, actual, months, regimes)
        assert out["a"].rmse == pytest.approx(3.0)
        assert out["b"].rmse == pytest.approx(4.0)
        assert out["all"].rmse == pytest.approx(np.sqrt(12.5))

    def test_pooling_identity_weighted(self):
        rng = np.random.default_rng(6)
        months = list(range(24000, 24030))
        pred, actual = rng.normal(size=30), rng.normal(size=30)
        regimes = {"x": set(months[:9]), "y": set(months[9:])}
        out = split_eval(pred, actual, months, regimes)
        pooled = (9 * out["x"].rmse ** 2 + 21 * out["y"].rmse ** 2) / 30
        assert out["all"].rmse ** 2 == pytest.approx(pooled, abs=1e-10)

    def test_uncovered_month_rejected(self):
        with pytest.raises(DataError, match="not covered"):
            split_eval([1.0], [1.0], [24000], {"a": {24001}})

    def test_overlapping_regimes_rejected(self):
        with pytest.raises(DataError, match="both"):
            split_eval(
                [1.0, 2.0], [1.0, 2.0], [24000, 24001],
                {"a": {24000, 24001}, "b": {24001}},
            )

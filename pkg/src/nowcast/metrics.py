"""Out-of-sample evaluation: RMSE, reduction over a baseline, the
Diebold-Mariano equal-accuracy test with the small-sample correction, and
regime-split summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DataError


def rmse(pred, actual) -> float:
    p = np.asarray(pred, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    if p.size == 0:
        raise DataError("rmse: empty input")
    if p.shape != a.shape:
        raise DataError(f"rmse: length mismatch {p.shape} vs {a.shape}")
    d = p - a
    return float(np.sqrt(d @ d / d.size))


def rmse_reduction(baseline: float, model: float) -> float:
    """Percent RMSE reduction of ``model`` relative to ``baseline``."""
    if baseline <= 0.0:
        raise DataError(f"rmse_reduction: baseline must be > 0, got {baseline}")
    return 100.0 * (1.0 - model / baseline)


def display_reduction(pct: float) -> int:
    """Integer percent, half away from zero (table display convention)."""
    return int(math.floor(pct + 0.5)) if pct >= 0 else -int(math.floor(-pct + 0.5))


@dataclass
class DmResult:
    statistic: float
    p_value: float
    indistinguishable: bool = False


def dm_test(errors_a, errors_b, h: int = 1, loss: str = "squared") -> DmResult:
    """Diebold-Mariano test of equal predictive accuracy.

    d_t = L(a_t) - L(b_t); long-run variance via Newey-West with a Bartlett
    kernel truncated at lag h-1; the Harvey-Leybourne-Newbold small-sample
    factor rescales the statistic; two-sided p from Student t with T-1 dof.
    A negative statistic favors ``a``.  Identical loss series return the
    explicit indistinguishable sentinel instead of dividing by zero.
    """
    a = np.asarray(errors_a, dtype=np.float64)
    b = np.asarray(errors_b, dtype=np.float64)
    if a.shape != b.shape:
        raise DataError("dm_test: length mismatch")
    T = a.size
    if T < 8:
        raise DataError(f"dm_test: need >= 8 observations, got {T}")
    if h < 1:
        raise DataError("dm_test: h must be >= 1")
    if loss == "squared":
        d = a * a - b * b
    elif loss == "absolute":
        d = np.abs(a) - np.abs(b)
    else:
        raise DataError(f"dm_test: unknown loss {loss!r}")

    dbar = d.mean()
    dc = d - dbar
    if np.all(dc == 0.0):
        return DmResult(0.0, 1.0, indistinguishable=True)
    lrv = float(dc @ dc) / T
    for j in range(1, h):
        gamma = float(dc[j:] @ dc[:-j]) / T
        lrv += 2.0 * (1.0 - j / h) * gamma
    if lrv <= 0.0:
        return DmResult(0.0, 1.0, indistinguishable=True)
    stat = dbar / np.sqrt(lrv / T)
    hln = np.sqrt((T + 1 - 2 * h + h * (h - 1) / T) / T)
    stat = float(hln * stat)
    p = float(2.0 * stats.t.sf(abs(stat), df=T - 1))
    return DmResult(stat, p)


@dataclass
class RegimeSection:
    regime: str
    months: list[int]
    rmse: float


def split_eval(pred, actual, months, regimes: dict[str, set[int]]) -> dict[str, RegimeSection]:
    """Per-regime and overall RMSE.  ``regimes`` must partition ``months``;
    the overall entry is keyed "all"."""
    p = np.asarray(pred, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    months = [int(m) for m in months]
    if not (p.size == a.size == len(months)):
        raise DataError("split_eval: length mismatch")
    seen: dict[int, str] = {}
    for name, mset in regimes.items():
        for m in mset:
            if m in seen:
                raise DataError(f"split_eval: month {m} in both {seen[m]!r} and {name!r}")
            seen[int(m)] = name
    missing = [m for m in months if m not in seen]
    if missing:
        raise DataError(f"split_eval: months not covered by any regime: {missing}")

    out: dict[str, RegimeSection] = {}
    for name in regimes:
        idx = [i for i, m in enumerate(months) if seen[m] == name]
        if idx:
            out[name] = RegimeSection(name, [months[i] for i in idx], rmse(p[idx], a[idx]))
    out["all"] = RegimeSection("all", list(months), rmse(p, a))
    return out

"""Univariate F-test feature scoring and k-best selection."""

from __future__ import annotations

import numpy as np
from scipy import stats

from .errors import DataError

#: cap used when a feature is perfectly correlated with the target
F_CAP = 1e30


def fscore(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Univariate regression F-score and p-value.

    r = Pearson correlation, F = r^2 / (1 - r^2) * (n - 2), p from the upper
    tail of F(1, n-2).  Perfect correlation returns the cap with p = 0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.size
    if n < 3:
        raise DataError(f"fscore: need n >= 3, got {n}")
    if y.size != n:
        raise DataError("fscore: length mismatch")
    sx, sy = x.std(), y.std()
    if sx == 0.0 or sy == 0.0:
        raise DataError("fscore: constant column")
    r = float(((x - x.mean()) * (y - y.mean())).mean() / (sx * sy))
    r2 = min(r * r, 1.0)
    if r2 >= 1.0 - 1e-15:
        return F_CAP, 0.0
    F = r2 / (1.0 - r2) * (n - 2)
    p = float(stats.f.sf(F, 1, n - 2))
    return float(F), p


def select_k_best(X: np.ndarray, y: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k features with the largest F-scores, ties broken by
    lower column index.  Result is sorted ascending."""
    X = np.asarray(X, dtype=np.float64)
    m = X.shape[1]
    if not 1 <= k <= m:
        raise DataError(f"select_k_best: k={k} out of range 1..{m}")
    scores = np.array([fscore(X[:, j], y)[0] for j in range(m)])
    order = np.argsort(-scores, kind="stable")  # stable sort keeps lower index first on ties
    return np.sort(order[:k])

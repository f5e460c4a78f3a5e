"""Pure-NumPy split-scan kernels.  Reference implementation; the compiled
extension in _speedups.pyx mirrors the arithmetic operation-for-operation so
both backends return bit-identical results."""

import numpy as np

NO_SPLIT = (-1, -1, 0.0, 0.0)


def scan_columns(xs, ys):
    """Best SSE-reduction split over pre-sorted columns.

    xs: (n, m) feature values, each column sorted ascending.
    ys: (n, m) targets re-ordered by each column's sort order.
    Returns (col, pos, gain, threshold) where the split sends rows with
    value <= threshold left; pos is the last left index in sorted order.
    Ties break toward the lowest column, then the lowest threshold.
    (-1, -1, 0.0, 0.0) means no strictly positive gain exists.
    """
    n, m = xs.shape
    if n < 2 or m == 0:
        return NO_SPLIT
    csum = np.cumsum(ys, axis=0)
    total = csum[-1]
    nl = np.arange(1, n, dtype=np.float64)[:, None]
    left = csum[:-1]
    right = total - left
    gains = left * left / nl + right * right / (n - nl) - total * total / n
    gains[xs[1:] == xs[:-1]] = -np.inf

    # column-major argmax == first (col, pos) among maxima, matching the
    # compiled loop's strictly-greater update rule
    flat = np.argmax(gains.T)
    col, pos = int(flat // (n - 1)), int(flat % (n - 1))
    gain = float(gains[pos, col])
    if not np.isfinite(gain) or gain <= 0.0:
        return NO_SPLIT
    lo = xs[pos, col]
    hi = xs[pos + 1, col]
    threshold = 0.5 * (lo + hi)
    if threshold >= hi:  # adjacent floats: keep the boundary on the left value
        threshold = lo
    return col, pos, gain, float(threshold)

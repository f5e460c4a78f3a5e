# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled split-scan kernel.  Twin of _pure.scan_columns: identical
accumulation order and arithmetic, so results are bit-identical."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

NO_SPLIT = (-1, -1, 0.0, 0.0)


def scan_columns(double[:, ::1] xs, double[:, ::1] ys):
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t m = xs.shape[1]
    if n < 2 or m == 0:
        return NO_SPLIT

    cdef Py_ssize_t i, j
    cdef double total, left, right, gain, ttn
    cdef double nd = <double> n
    cdef double best_gain = 0.0
    cdef Py_ssize_t best_col = -1
    cdef Py_ssize_t best_pos = -1

    for j in range(m):
        total = 0.0
        for i in range(n):
            total += ys[i, j]
        ttn = total * total / nd
        left = 0.0
        for i in range(n - 1):
            left += ys[i, j]
            if xs[i + 1, j] == xs[i, j]:
                continue
            right = total - left
            gain = left * left / (<double> (i + 1)) + right * right / (nd - <double> (i + 1)) - ttn
            if gain > best_gain:
                best_gain = gain
                best_col = j
                best_pos = i

    if best_col < 0:
        return NO_SPLIT
    cdef double lo = xs[best_pos, best_col]
    cdef double hi = xs[best_pos + 1, best_col]
    cdef double threshold = 0.5 * (lo + hi)
    if threshold >= hi:
        threshold = lo
    return int(best_col), int(best_pos), float(best_gain), float(threshold)

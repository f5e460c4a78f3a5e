"""Simplified dynamic factor model: principal-component factors, a VAR(1) on
the factors, AR(1) diagnostics for the idiosyncratic parts, and a bridge
regression from factors to the target."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import DataError, NumericalError
from .linear import LinearFit, fit_ols


def extract_factors(Xstd: np.ndarray, r: int):
    """Top-r principal components of a standardized matrix.

    Returns (loadings, factors) with X ~= factors @ loadings.T, factor columns
    orthogonal with unit sample variance (ddof=1), and each loading column's
    largest-magnitude entry positive.
    """
    X = np.asarray(Xstd, dtype=np.float64)
    n, m = X.shape
    if not 1 <= r <= min(n, m):
        raise DataError(f"extract_factors: r={r} out of range for {n}x{m} matrix")
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    scale = np.sqrt(n - 1.0)
    factors = U[:, :r] * scale
    loadings = (Vt[:r].T * s[:r]) / scale
    for k in range(r):
        lead = int(np.argmax(np.abs(loadings[:, k])))
        if loadings[lead, k] < 0.0:
            loadings[:, k] = -loadings[:, k]
            factors[:, k] = -factors[:, k]
    return loadings, factors


def fit_var1(factors: np.ndarray) -> np.ndarray:
    """Least-squares VAR(1) coefficient: regress f_t on f_{t-1}."""
    F = np.asarray(factors, dtype=np.float64)
    n, r = F.shape
    if n < r + 2:
        raise DataError(f"fit_var1: need >= r+2 observations, got {n} for r={r}")
    lagged, lead = F[:-1], F[1:]
    gram = lagged.T @ lagged
    if np.linalg.matrix_rank(gram) < r:
        raise NumericalError("fit_var1: singular regressor matrix")
    A1 = np.linalg.solve(gram, lagged.T @ lead).T
    return A1


def _idio_ar1(resid: np.ndarray) -> np.ndarray:
    """Per-column lag-1 autoregression coefficient of the idiosyncratic parts."""
    lagged, lead = resid[:-1], resid[1:]
    denom = (lagged * lagged).sum(axis=0)
    out = np.zeros(resid.shape[1])
    ok = denom > 0.0
    out[ok] = (lagged * lead).sum(axis=0)[ok] / denom[ok]
    return out


@dataclass
class DfmFit:
    loadings: np.ndarray
    factors: np.ndarray
    A1: np.ndarray
    idio_ar1: np.ndarray
    bridge: LinearFit
    r: int
    col_means: np.ndarray
    col_sds: np.ndarray
    spectral_radius: float

    def factor_scores(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.col_means.size:
            raise DataError(f"dfm: feature mismatch, got shape {X.shape}")
        Z = (X - self.col_means) / self.col_sds
        # least-squares projection onto the loading space
        return Z @ self.loadings @ np.linalg.inv(self.loadings.T @ self.loadings)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.bridge.predict(self.factor_scores(X))


def fit_dfm(X: np.ndarray, y: np.ndarray, r: int = 2) -> DfmFit:
    """Standardize, extract r factors, fit the VAR(1) and idiosyncratic AR(1)
    diagnostics, and bridge-regress the target on contemporaneous factors."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    means = X.mean(axis=0)
    sds = X.std(axis=0)
    if (sds == 0.0).any():
        raise DataError("fit_dfm: zero-variance column")
    Z = (X - means) / sds
    loadings, factors = extract_factors(Z, r)
    A1 = fit_var1(factors)
    rho = float(np.max(np.abs(np.linalg.eigvals(A1))))
    if rho >= 1.0:
        warnings.warn(f"fit_dfm: VAR(1) spectral radius {rho:.3f} >= 1", stacklevel=2)
    resid = Z - factors @ loadings.T
    bridge = fit_ols(factors, y)
    return DfmFit(loadings, factors, A1, _idio_ar1(resid), bridge, r, means, sds, rho)


def dfm_nowcast(fit: DfmFit, X: np.ndarray) -> np.ndarray:
    """Bridge prediction from contemporaneous factor scores (predictors are
    already lag-aligned by the horizon spec)."""
    return fit.predict(X)

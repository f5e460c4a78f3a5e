"""Epsilon-insensitive support vector regression solved in the dual.

The dual is written in the collapsed variables beta_i = alpha_i - alpha_i^*
(valid because both cannot be active at the optimum):

    minimize   0.5 * beta' K beta - y' beta + eps * ||beta||_1
    subject to sum(beta) = 0,  -C <= beta_i <= C

Each step picks the most-violating pair (steepest feasible descent direction
that keeps the sum constraint) and solves the one-dimensional piecewise
quadratic exactly, so the optimizer is deterministic and needs no RNG.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError, NumericalError
from .linear import _require_standardized


def kernel_matrix(A: np.ndarray, B: np.ndarray, kernel: str, degree: int, gamma: float) -> np.ndarray:
    if kernel == "linear":
        return A @ B.T
    if kernel == "poly":
        return (A @ B.T + 1.0) ** degree
    if kernel == "rbf":
        if gamma <= 0.0:
            raise DataError(f"svr: rbf gamma must be > 0, got {gamma}")
        sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise DataError(f"svr: unknown kernel {kernel!r}")


@dataclass
class SvrFit:
    X_train: np.ndarray
    beta: np.ndarray
    bias: float
    kernel: str
    degree: int
    gamma: float
    hyperparams: dict
    iterations: int
    dual_objective: float
    kkt_violation: float

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.X_train.shape[1]:
            raise DataError(f"svr predict: feature mismatch, got shape {X.shape}")
        K = kernel_matrix(X, self.X_train, self.kernel, self.degree, self.gamma)
        return K @ self.beta + self.bias


def svr_dual_objective(K: np.ndarray, y: np.ndarray, beta: np.ndarray, eps: float) -> float:
    """Value of the maximized dual: -(0.5 b'Kb - y'b + eps||b||_1)."""
    return float(-(0.5 * beta @ K @ beta - y @ beta + eps * np.abs(beta).sum()))


def _pair_step(t_lo, t_hi, q, g_diff, bi, bj, eps):
    """Minimize 0.5*q*t^2 + g_diff*t + eps*(|bi+t| + |bj-t|) over [t_lo, t_hi]."""
    cand = [t_lo, t_hi]
    for brk in (-bi, bj):
        if t_lo < brk < t_hi:
            cand.append(brk)
    # unconstrained minimizer on each sign segment
    for si in (-1.0, 1.0):
        for sj in (-1.0, 1.0):
            if q > 0.0:
                t = -(g_diff + eps * (si - sj)) / q
                if t_lo <= t <= t_hi:
                    cand.append(t)

    def val(t):
        return 0.5 * q * t * t + g_diff * t + eps * (abs(bi + t) + abs(bj - t))

    best = min(cand, key=lambda t: (val(t), t))
    return best


def fit_svr(
    X: np.ndarray,
    y: np.ndarray,
    C: float = 3.0,
    eps: float = 0.3,
    kernel: str = "rbf",
    degree: int = 2,
    gamma: float | None = None,
    max_iter: int = 100_000,
    tol: float = 1e-6,
) -> SvrFit:
    """Pairwise dual coordinate optimization; stops when the largest KKT
    violation drops below ``tol``.  gamma defaults to 1/M on standardized
    features; degree is stored but inert for non-polynomial kernels."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, m = X.shape
    if C <= 0.0 or eps < 0.0:
        raise DataError(f"svr: need C > 0 and eps >= 0, got C={C}, eps={eps}")
    _require_standardized(X, "fit_svr")
    if gamma is None:
        gamma = 1.0 / m
    K = kernel_matrix(X, X, kernel, degree, gamma)

    beta = np.zeros(n)
    G = -y.copy()  # gradient of the smooth part: K beta - y

    it = 0
    violation = np.inf
    for it in range(1, max_iter + 1):
        sign_up = np.where(beta >= 0.0, 1.0, -1.0)    # right derivative sign of |.|
        sign_dn = np.where(beta > 0.0, 1.0, -1.0)     # left derivative sign
        d_up = G + eps * sign_up
        d_dn = G + eps * sign_dn
        can_up = beta < C
        can_dn = beta > -C
        if not can_up.any() or not can_dn.any():
            break
        i = int(np.flatnonzero(can_up)[np.argmin(d_up[can_up])])
        j = int(np.flatnonzero(can_dn)[np.argmax(d_dn[can_dn])])
        violation = float(d_dn[j] - d_up[i])
        if violation < tol:
            break
        t_lo = max(-C - beta[i], beta[j] - C)
        t_hi = min(C - beta[i], beta[j] + C)
        q = K[i, i] + K[j, j] - 2.0 * K[i, j]
        t = _pair_step(t_lo, t_hi, max(q, 0.0), G[i] - G[j], beta[i], beta[j], eps)
        if t == 0.0:
            break
        beta[i] += t
        beta[j] -= t
        G += (K[:, i] - K[:, j]) * t
    else:
        raise NumericalError(
            f"fit_svr: max_iter={max_iter} exhausted with KKT violation {violation:.3e}"
        )

    # bias from free (interior, nonzero) vectors; midpoint of the feasible
    # interval when none exist
    free = (np.abs(beta) > 1e-10) & (np.abs(beta) < C - 1e-10)
    if free.any():
        bias = float(np.mean(y[free] - (K @ beta)[free] - eps * np.sign(beta[free])))
    else:
        sign_up = np.where(beta >= 0.0, 1.0, -1.0)
        sign_dn = np.where(beta > 0.0, 1.0, -1.0)
        d_up = G + eps * sign_up
        d_dn = G + eps * sign_dn
        lo = -d_up[beta < C].min() if (beta < C).any() else 0.0
        hi = -d_dn[beta > -C].max() if (beta > -C).any() else 0.0
        bias = float((lo + hi) / 2.0)

    return SvrFit(
        X_train=X,
        beta=beta,
        bias=bias,
        kernel=kernel,
        degree=degree,
        gamma=gamma,
        hyperparams={"C": C, "eps": eps, "kernel": kernel, "degree": degree, "gamma": gamma},
        iterations=it,
        dual_objective=svr_dual_objective(K, y, beta, eps),
        kkt_violation=max(violation, 0.0),
    )

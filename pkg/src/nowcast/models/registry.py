"""Uniform model layer for the CV driver and pipeline.

A ModelSpec is (family, params); fitting takes a FeatureFrame restricted to
the training rows and returns a handle whose ``predict`` accepts full-width
feature matrices.  Per-family plumbing lives here: training-window
standardization where the solver requires it, target scaling for the network,
and optional k-best selection over the payment columns (benchmark columns are
always retained; scoring uses training rows only).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..design import FeatureFrame
from ..errors import ConfigError
from ..selection import select_k_best
from .dfm import fit_dfm
from .linear import fit_enet, fit_ols
from .mlp import MlpParams, fit_mlp
from .svr import fit_svr
from .trees import fit_gbr, fit_rfr

FAMILIES = ("ols", "enet", "svr", "rfr", "gbr", "mlp", "dfm")


class FittedModel:
    """Trained handle: selects its columns, then runs the family predictor."""

    def __init__(self, columns: np.ndarray, inner, params: dict):
        self.columns = columns
        self._inner = inner
        self.params = dict(params)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        return self._inner(X[:, self.columns])

    def predict_selected(self, Z: np.ndarray) -> np.ndarray:
        """Predict from an already column-selected matrix (explanation path)."""
        return self._inner(np.asarray(Z, dtype=np.float64))


def _standardizer(X: np.ndarray):
    means = X.mean(axis=0)
    sds = X.std(axis=0)
    sds = np.where(sds == 0.0, 1.0, sds)  # degenerate columns pass through centered
    return means, sds


@dataclass(frozen=True)
class ModelSpec:
    family: str
    params: dict
    seed: int = 0

    def fit(self, frame: FeatureFrame) -> FittedModel:
        params = dict(self.params)
        k_best = params.pop("k_best", None)

        columns = np.arange(frame.n_features)
        if k_best is not None and frame.payment_features:
            pay_idx = np.array(
                [frame.feature_names.index(n) for n in frame.payment_features]
            )
            k = int(min(k_best, pay_idx.size))
            keep_local = select_k_best(frame.X[:, pay_idx], frame.y, k)
            keep_pay = set(pay_idx[keep_local].tolist())
            columns = np.array(
                [
                    j
                    for j in range(frame.n_features)
                    if j in keep_pay or frame.feature_names[j] not in frame.payment_features
                ]
            )
        X = frame.X[:, columns]
        y = frame.y

        if self.family == "ols":
            fit = fit_ols(X, y)
            inner = fit.predict
        elif self.family == "enet":
            means, sds = _standardizer(X)
            fit = fit_enet(
                (X - means) / sds,
                y,
                alpha=float(params.get("alpha", 0.001)),
                l1_ratio=float(params.get("l1_ratio", 0.5)),
                max_iter=int(params.get("max_iter", 2000)),
                tol=float(params.get("tol", 1e-6)),
            )
            inner = lambda Z: fit.predict((Z - means) / sds)  # noqa: E731
        elif self.family == "svr":
            means, sds = _standardizer(X)
            fit = fit_svr(
                (X - means) / sds,
                y,
                C=float(params.get("C", 3.0)),
                eps=float(params.get("eps", 0.3)),
                kernel=str(params.get("kernel", "rbf")),
                degree=int(params.get("degree", 2)),
                gamma=params.get("gamma"),
            )
            inner = lambda Z: fit.predict((Z - means) / sds)  # noqa: E731
        elif self.family == "rfr":
            fit = fit_rfr(
                X,
                y,
                n_estimators=int(params.get("n_estimators", 400)),
                max_depth=int(params.get("max_depth", 4)),
                min_samples_split=int(params.get("min_samples_split", 2)),
                m_features=params.get("m_features"),
                bootstrap=bool(params.get("bootstrap", True)),
                seed=int(params.get("seed", self.seed)),
                per_split=bool(params.get("per_split", False)),
            )
            inner = fit.predict
        elif self.family == "gbr":
            fit = fit_gbr(
                X,
                y,
                n_estimators=int(params.get("n_estimators", 1000)),
                learning_rate=float(params.get("learning_rate", 0.1)),
                max_depth=int(params.get("max_depth", 1)),
                seed=int(params.get("seed", self.seed)),
            )
            inner = fit.predict
        elif self.family == "mlp":
            means, sds = _standardizer(X)
            y_mean, y_sd = float(y.mean()), float(y.std())
            if y_sd == 0.0:
                y_sd = 1.0
            hidden = params.get("hidden", 3)
            hidden_sizes = (
                tuple(int(h) for h in hidden) if isinstance(hidden, (tuple, list))
                else (int(hidden),)
            )
            fit = fit_mlp(
                (X - means) / sds,
                (y - y_mean) / y_sd,
                MlpParams(
                    hidden_sizes=hidden_sizes,
                    activation=str(params.get("activation", "relu")),
                    learning_rate=float(params.get("learning_rate", 0.05)),
                    schedule=str(params.get("schedule", "adaptive-halving")),
                    epochs=int(params.get("epochs", 2000)),
                    seed=int(params.get("seed", self.seed)),
                ),
            )
            inner = lambda Z: fit.predict((Z - means) / sds) * y_sd + y_mean  # noqa: E731
        elif self.family == "dfm":
            fit = fit_dfm(X, y, r=int(params.get("r", 2)))
            inner = fit.predict
        else:
            raise ConfigError(f"unknown model family {self.family!r}")

        shown = dict(self.params)
        return FittedModel(columns, inner, shown)


def make_spec(family: str, params: dict, seed: int = 0) -> ModelSpec:
    if family not in FAMILIES:
        raise ConfigError(f"unknown model family {family!r}, expected one of {FAMILIES}")
    return ModelSpec(family, dict(params), seed)

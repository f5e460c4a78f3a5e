"""CART regression trees and the two ensembles built from them.

Split search: greedy SSE reduction over midpoints of sorted unique feature
values, ties broken toward the lowest feature index then lowest threshold.
The scan itself runs in the compiled kernel when available (see _kernels).

Forest trees draw their randomness from per-tree seeds spawned from the
master seed, so results do not depend on fit scheduling.  Boosting is
sequential by nature and uses no randomness at all.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..errors import DataError, NumericalError


@dataclass
class RegressionTree:
    """Flat node-array tree.  feature[i] < 0 marks a leaf; value[i] is the
    mean of the training targets routed to node i."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int
    max_depth: int
    min_samples_split: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DataError(f"tree expects {self.n_features} features, got shape {X.shape}")
        node = np.zeros(X.shape[0], dtype=np.intp)
        while True:
            feat = self.feature[node]
            hot = feat >= 0
            if not hot.any():
                break
            rows = np.flatnonzero(hot)
            go_left = X[rows, feat[rows]] <= self.threshold[node[rows]]
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])
        return self.value[node]

    def depth(self) -> int:
        def walk(i):
            if self.feature[i] < 0:
                return 0
            return 1 + max(walk(self.left[i]), walk(self.right[i]))

        return walk(0)

    def to_dict(self) -> dict:
        nodes = []
        for i in range(len(self.feature)):
            if self.feature[i] < 0:
                nodes.append({"value": float(self.value[i])})
            else:
                nodes.append(
                    {
                        "feature": int(self.feature[i]),
                        "threshold": float(self.threshold[i]),
                        "left": int(self.left[i]),
                        "right": int(self.right[i]),
                        "value": float(self.value[i]),
                    }
                )
        return {
            "n_features": self.n_features,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "nodes": nodes,
        }

    @staticmethod
    def from_dict(d: dict) -> "RegressionTree":
        nodes = d["nodes"]
        k = len(nodes)
        feature = np.full(k, -1, dtype=np.int32)
        threshold = np.zeros(k)
        left = np.zeros(k, dtype=np.int32)
        right = np.zeros(k, dtype=np.int32)
        value = np.zeros(k)
        for i, nd in enumerate(nodes):
            value[i] = nd.get("value", 0.0)
            if "feature" in nd:
                feature[i] = nd["feature"]
                threshold[i] = nd["threshold"]
                left[i] = nd["left"]
                right[i] = nd["right"]
        return RegressionTree(
            feature, threshold, left, right, value,
            d["n_features"], d["max_depth"], d["min_samples_split"],
        )


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    min_samples_split: int = 2,
    feature_subset=None,
    per_split_m: int | None = None,
    rng: np.random.Generator | None = None,
    _root_presort=None,
) -> RegressionTree:
    """Greedy variance-reduction CART fit.

    ``feature_subset`` restricts every split to those columns (per-tree
    subsampling); ``per_split_m`` instead draws a fresh subset of that size at
    each node from ``rng``.  ``_root_presort`` is an internal fast path used
    by boosting: (sorted_values, sort_order) for the full row set.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, n_features = X.shape
    if n == 0:
        raise DataError("fit_tree: empty training set")
    if per_split_m is not None and rng is None:
        raise DataError("fit_tree: per_split_m requires an rng")
    base_feats = np.arange(n_features) if feature_subset is None else np.sort(
        np.asarray(feature_subset, dtype=np.intp)
    )

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def split_node(rows: np.ndarray, depth: int, presort) -> int:
        node = new_node()
        value[node] = float(y[rows].mean())
        if depth >= max_depth or rows.size < min_samples_split:
            return node
        if per_split_m is not None:
            feats = np.sort(rng.choice(base_feats, size=min(per_split_m, base_feats.size),
                                       replace=False))
        else:
            feats = base_feats
        if presort is not None:
            xs, order = presort
            ys = np.ascontiguousarray(y[order])
        else:
            sub = X[np.ix_(rows, feats)]
            order = np.argsort(sub, axis=0, kind="stable")
            xs = np.ascontiguousarray(np.take_along_axis(sub, order, axis=0))
            ys = np.ascontiguousarray(y[rows][order])
        col, _pos, _gain, thr = _kernels.scan_columns(xs, ys)
        if col < 0:
            return node
        feat = int(feats[col])
        go_left = X[rows, feat] <= thr
        feature[node] = feat
        threshold[node] = thr
        left[node] = split_node(rows[go_left], depth + 1, None)
        right[node] = split_node(rows[~go_left], depth + 1, None)
        return node

    root_presort = None
    if _root_presort is not None and per_split_m is None and feature_subset is None:
        root_presort = _root_presort
    split_node(np.arange(n), 0, root_presort)
    return RegressionTree(
        np.array(feature, dtype=np.int32),
        np.array(threshold),
        np.array(left, dtype=np.int32),
        np.array(right, dtype=np.int32),
        np.array(value),
        n_features,
        max_depth,
        min_samples_split,
    )


def presort_matrix(X: np.ndarray):
    """Column sort order and sorted values for the root-node fast path."""
    X = np.asarray(X, dtype=np.float64)
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.ascontiguousarray(np.take_along_axis(X, order, axis=0))
    return xs, order


@dataclass
class Ensemble:
    """Bagged or boosted collection of regression trees.

    boosting: prediction = base_value + learning_rate * sum(tree outputs)
    bagging:  prediction = mean(tree outputs)
    """

    mode: str
    trees: list[RegressionTree]
    learning_rate: float = 1.0
    base_value: float = 0.0
    seed: int | None = None
    tree_records: list[dict] = field(default_factory=list)
    train_sse_path: np.ndarray | None = None

    def predict(self, X: np.ndarray) -> np.ndarray:
        return predict_ensemble(self, X)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "learning_rate": self.learning_rate,
            "base_value": self.base_value,
            "seed": self.seed,
            "trees": [t.to_dict() for t in self.trees],
        }

    @staticmethod
    def from_dict(d: dict) -> "Ensemble":
        return Ensemble(
            d["mode"],
            [RegressionTree.from_dict(td) for td in d["trees"]],
            d["learning_rate"],
            d["base_value"],
            d.get("seed"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def predict_ensemble(e: Ensemble, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"predict_ensemble: X must be 2-D, got shape {X.shape}")
    if e.mode == "boosting":
        out = np.full(X.shape[0], e.base_value)
        for t in e.trees:
            out += e.learning_rate * t.predict(X)
        return out
    if e.mode == "bagging":
        if not e.trees:
            raise DataError("predict_ensemble: empty bagging ensemble")
        out = np.zeros(X.shape[0])
        for t in e.trees:
            out += t.predict(X)
        return out / len(e.trees)
    raise DataError(f"unknown ensemble mode {e.mode!r}")


def fit_rfr(
    X: np.ndarray,
    y: np.ndarray,
    n_estimators: int = 400,
    max_depth: int = 4,
    min_samples_split: int = 2,
    m_features: int | None = None,
    bootstrap: bool = True,
    seed: int = 0,
    per_split: bool = False,
) -> Ensemble:
    """Random forest: seeded bootstrap samples and feature subsets per tree
    (or per split when ``per_split``), prediction = mean over trees."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, M = X.shape
    if n_estimators < 1:
        raise DataError("fit_rfr: n_estimators must be >= 1")
    m = int(np.ceil(M / 3)) if m_features is None else int(m_features)
    m = max(1, min(m, M))

    trees, records = [], []
    for child in np.random.SeedSequence(seed).spawn(n_estimators):
        rng = np.random.default_rng(child)
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        if per_split:
            tree = fit_tree(X[rows], y[rows], max_depth, min_samples_split,
                            per_split_m=m, rng=rng)
            feats = None
        else:
            feats = np.sort(rng.choice(M, size=m, replace=False))
            tree = fit_tree(X[rows], y[rows], max_depth, min_samples_split,
                            feature_subset=feats)
        trees.append(tree)
        records.append(
            {"rows": rows, "features": feats if feats is not None else "per-split"}
        )
    return Ensemble("bagging", trees, seed=seed, tree_records=records)


def fit_gbr(
    X: np.ndarray,
    y: np.ndarray,
    n_estimators: int = 1000,
    learning_rate: float = 0.1,
    max_depth: int = 1,
    seed: int = 0,
    min_samples_split: int = 2,
) -> Ensemble:
    """Least-squares gradient boosting: start from mean(y), fit each tree to
    the current residuals, shrink by the learning rate.

    Training SSE is recorded per stage; it is nonincreasing for any rate in
    (0, 2] because each tree is the least-squares fit of its residual target.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not 0.0 < learning_rate <= 2.0:
        raise DataError(f"fit_gbr: learning_rate must be in (0, 2], got {learning_rate}")
    if n_estimators < 1:
        raise DataError("fit_gbr: n_estimators must be >= 1")
    if X.shape[0] == 0:
        raise DataError("fit_gbr: empty training set")

    base = float(y.mean())
    resid = y - base
    presort = presort_matrix(X)
    trees = []
    sse_path = np.empty(n_estimators + 1)
    sse_path[0] = float(resid @ resid)
    for p in range(n_estimators):
        tree = fit_tree(X, resid, max_depth, min_samples_split, _root_presort=presort)
        resid = resid - learning_rate * tree.predict(X)
        if not np.isfinite(resid).all():
            raise NumericalError(f"fit_gbr: non-finite residuals at stage {p + 1}")
        sse_path[p + 1] = float(resid @ resid)
        trees.append(tree)
    return Ensemble(
        "boosting", trees, learning_rate, base, seed=seed, train_sse_path=sse_path
    )

"""Shapley-value attributions for any trained regressor.

The coalition value v(S) replaces every feature outside S with the values of
B background rows drawn once per explainer (seeded), then averages the model
prediction over the draws.  Sharing the same drawn rows across every
coalition makes the dummy axiom hold exactly: a feature the model never reads
contributes identical predictions to v(S + i) and v(S).

exact_shapley enumerates all 2^M coalitions with the factorial weights;
kernel_shap solves the weighted least-squares formulation over sampled
coalitions with the full and empty coalitions eliminated, so the efficiency
identity holds by construction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError

EXACT_LIMIT = 15
_EXACT_TOL = 1e-10
_KERNEL_TOL = 1e-6


@dataclass
class ValueFunction:
    predict: callable
    background: np.ndarray
    draws: int = 32
    seed: int = 0

    def __post_init__(self):
        bg = np.asarray(self.background, dtype=np.float64)
        if bg.ndim != 2 or bg.shape[0] == 0:
            raise DataError("value function: background must be a nonempty 2-D array")
        self.background = bg
        rng = np.random.default_rng(np.random.SeedSequence([int(self.seed), bg.shape[0]]))
        idx = rng.integers(0, bg.shape[0], size=self.draws)
        self.drawn_rows = bg[idx]

    @property
    def n_features(self) -> int:
        return self.background.shape[1]

    def coalition_values(self, masks: np.ndarray, x: np.ndarray, chunk: int = 512) -> np.ndarray:
        """v(S) for every bitmask in ``masks`` (bit j set = feature j present)."""
        x = np.asarray(x, dtype=np.float64)
        M = self.n_features
        if x.shape != (M,):
            raise DataError(f"value function: instance must have {M} features")
        bits = ((masks[:, None] >> np.arange(M)[None, :]) & 1).astype(bool)
        out = np.empty(masks.size)
        B = self.draws
        for lo in range(0, masks.size, chunk):
            sel = bits[lo : lo + chunk]
            Z = np.where(sel[:, None, :], x[None, None, :], self.drawn_rows[None, :, :])
            preds = np.asarray(self.predict(Z.reshape(-1, M)), dtype=np.float64)
            out[lo : lo + chunk] = preds.reshape(sel.shape[0], B).mean(axis=1)
        return out


@dataclass
class ShapExplanation:
    feature_names: tuple[str, ...]
    base_value: float
    phi: np.ndarray
    prediction: float
    feature_values: np.ndarray
    method: str
    month: int | None = None

    def __post_init__(self):
        tol = _EXACT_TOL if self.method == "exact" else _KERNEL_TOL
        gap = abs(self.base_value + float(np.sum(self.phi)) - self.prediction)
        if gap > tol:
            raise NumericalError(
                f"shap efficiency violated: |base + sum(phi) - f(x)| = {gap:.3e} > {tol}"
            )

    def by_feature(self) -> dict[str, float]:
        return dict(zip(self.feature_names, self.phi.tolist()))


def exact_shapley(
    vf: ValueFunction, x: np.ndarray, feature_names=None, month: int | None = None
) -> ShapExplanation:
    """Average marginal contribution over all coalitions (2^M enumeration)."""
    M = vf.n_features
    if M > EXACT_LIMIT:
        raise DataError(f"exact_shapley: M={M} exceeds enumeration limit {EXACT_LIMIT}")
    masks = np.arange(1 << M, dtype=np.int64)
    v = vf.coalition_values(masks, x)

    fact = [math.factorial(i) for i in range(M + 1)]
    weight = np.array([fact[s] * fact[M - s - 1] / fact[M] for s in range(M)])
    sizes = np.array([int(m).bit_count() for m in masks])

    phi = np.zeros(M)
    for i in range(M):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        s = sizes[(masks & bit) == 0]
        phi[i] = float(np.sum(weight[s] * (v[without | bit] - v[without])))

    names = tuple(feature_names) if feature_names else tuple(f"x{i}" for i in range(M))
    return ShapExplanation(
        names, float(v[0]), phi, float(v[-1]), np.asarray(x, dtype=np.float64),
        "exact", month,
    )


def _kernel_weight(M: int, s: int) -> float:
    return (M - 1) / (math.comb(M, s) * s * (M - s))


def kernel_shap(
    vf: ValueFunction,
    x: np.ndarray,
    n_coalitions: int = 2048,
    seed: int = 0,
    feature_names=None,
    month: int | None = None,
) -> ShapExplanation:
    """Weighted least squares over sampled coalitions with the Shapley kernel.

    When the budget covers all 2^M - 2 proper coalitions they are enumerated
    with exact kernel weights (the estimate then equals the exact values up to
    the solve).  Otherwise coalition sizes are drawn from the kernel-weight
    distribution and duplicates merge by count.
    """
    M = vf.n_features
    if M < 2:
        raise DataError("kernel_shap: need at least 2 features")
    if n_coalitions < M + 2:
        raise DataError(f"kernel_shap: n_coalitions must be >= M+2 = {M + 2}")

    full = (1 << M) - 1
    if n_coalitions >= full - 1:
        masks = np.arange(1, full, dtype=np.int64)
        weights = np.array([_kernel_weight(M, int(m).bit_count()) for m in masks])
    else:
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), M]))
        size_w = np.array([_kernel_weight(M, s) * math.comb(M, s) for s in range(1, M)])
        size_w /= size_w.sum()
        counts: dict[int, int] = {}
        for _ in range(n_coalitions):
            s = 1 + int(rng.choice(M - 1, p=size_w))
            feats = rng.choice(M, size=s, replace=False)
            mask = 0
            for f in feats:
                mask |= 1 << int(f)
            counts[mask] = counts.get(mask, 0) + 1
        masks = np.array(sorted(counts), dtype=np.int64)
        weights = np.array([counts[int(m)] for m in masks], dtype=np.float64)

    both = np.concatenate([masks, [0, full]])
    v = vf.coalition_values(both, x)
    v_masks, v0, v_full = v[:-2], float(v[-2]), float(v[-1])
    total = v_full - v0

    # eliminate the last feature so efficiency holds exactly:
    # target = v(S) - v0 - [M in S] * total, design = z_i - z_M for i < M
    bits = ((masks[:, None] >> np.arange(M)[None, :]) & 1).astype(np.float64)
    A = bits[:, :-1] - bits[:, -1:]
    b = v_masks - v0 - bits[:, -1] * total
    sw = np.sqrt(weights)
    Aw = A * sw[:, None]
    bw = b * sw
    if np.linalg.matrix_rank(Aw) < M - 1:
        raise NumericalError("kernel_shap: singular regression (too few distinct coalitions)")
    coef, *_ = np.linalg.lstsq(Aw, bw, rcond=None)
    phi = np.empty(M)
    phi[:-1] = coef
    phi[-1] = total - coef.sum()

    names = tuple(feature_names) if feature_names else tuple(f"x{i}" for i in range(M))
    return ShapExplanation(
        names, v0, phi, v_full, np.asarray(x, dtype=np.float64), "kernel", month
    )


def global_importance(explanations: list[ShapExplanation]) -> list[tuple[str, float]]:
    """Mean absolute attribution per feature, sorted descending (ties by name)."""
    if not explanations:
        raise DataError("global_importance: empty explanation list")
    names = explanations[0].feature_names
    for e in explanations:
        if e.feature_names != names:
            raise DataError("global_importance: inconsistent feature sets")
    mean_abs = np.mean([np.abs(e.phi) for e in explanations], axis=0)
    ranked = sorted(zip(names, mean_abs.tolist()), key=lambda t: (-t[1], t[0]))
    return ranked


def dependence_data(
    explanations: list[ShapExplanation], feature: str, color_feature: str | None = None
) -> list[tuple[float, float, float | None]]:
    """One (feature value, phi, color value) row per explained instance."""
    if not explanations:
        raise DataError("dependence_data: empty explanation list")
    names = explanations[0].feature_names
    if feature not in names:
        raise DataError(f"dependence_data: unknown feature {feature!r}")
    if color_feature is not None and color_feature not in names:
        raise DataError(f"dependence_data: unknown color feature {color_feature!r}")
    j = names.index(feature)
    c = names.index(color_feature) if color_feature is not None else None
    rows = []
    for e in explanations:
        rows.append(
            (
                float(e.feature_values[j]),
                float(e.phi[j]),
                float(e.feature_values[c]) if c is not None else None,
            )
        )
    return rows


def write_shap_csv(explanations: list[ShapExplanation], path) -> None:
    """month,feature,phi,feature_value,prediction,base_value - one row per
    (instance, feature)."""
    from .months import month_to_str

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "feature", "phi", "feature_value", "prediction", "base_value"])
        for e in explanations:
            stamp = month_to_str(e.month) if e.month is not None else ""
            for name, phi, val in zip(e.feature_names, e.phi, e.feature_values):
                writer.writerow(
                    [stamp, name, repr(float(phi)), repr(float(val)),
                     repr(e.prediction), repr(e.base_value)]
                )


def write_importance_csv(explanations: list[ShapExplanation], path) -> None:
    """feature,mean_abs_phi,rank sorted by rank."""
    ranked = global_importance(explanations)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "mean_abs_phi", "rank"])
        for rank, (name, value) in enumerate(ranked, start=1):
            writer.writerow([name, repr(value), rank])

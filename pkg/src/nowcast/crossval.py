"""Randomized expanding-window cross-validation and grid search.

A fold samples n validation months without replacement from the superset
(repeats allowed across folds, never within one); each sampled month is
predicted by a model fit on all strictly earlier rows, so the order of the
series is never broken and nothing future leaks into a fit.  Grid search
averages the per-fold RMSEs and takes the argmin, ties going to the first
combination in declaration order.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from .design import FeatureFrame
from .errors import ConfigError, DataError
from .metrics import rmse
from .months import month_to_str


@dataclass(frozen=True)
class CvPlan:
    superset_start: int
    superset_end: int
    n: int = 24
    k: int = 5
    seed: int = 0
    mode: str = "randomized"  # or "standard-expanding"
    within_fold_replacement: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"cv: k must be >= 1, got {self.k}")
        if self.n < 1:
            raise ConfigError(f"cv: n must be >= 1, got {self.n}")
        if self.superset_start > self.superset_end:
            raise ConfigError("cv: superset start must not exceed end")
        if self.mode not in ("randomized", "standard-expanding"):
            raise ConfigError(f"cv: unknown mode {self.mode!r}")
        size = self.superset_end - self.superset_start + 1
        if size < self.n:
            raise ConfigError(f"cv: superset has {size} months, need >= n={self.n}")

    @property
    def superset_months(self) -> np.ndarray:
        return np.arange(self.superset_start, self.superset_end + 1)


def sample_validation_subset(plan: CvPlan, fold: int) -> np.ndarray:
    """Validation months for one fold, sorted ascending.

    randomized: n months drawn uniformly from the superset with a per-fold
    seed derived from (seed, fold).  standard-expanding: the f-th contiguous
    block of n months counting back from the superset end (fold 0 = the final
    window).
    """
    if not 0 <= fold < plan.k:
        raise ConfigError(f"cv: fold {fold} out of range 0..{plan.k - 1}")
    months = plan.superset_months
    if plan.mode == "standard-expanding":
        end = months.size - fold * plan.n
        start = end - plan.n
        if start < 0:
            raise ConfigError(
                f"cv: superset too small for {plan.k} standard blocks of {plan.n}"
            )
        return months[start:end]
    rng = np.random.default_rng(np.random.SeedSequence([int(plan.seed), int(fold)]))
    pick = rng.choice(months, size=plan.n, replace=plan.within_fold_replacement)
    return np.sort(pick)


@dataclass
class PredRecord:
    month: int
    prediction: float
    actual: float


def expanding_window_eval(model_spec, frame: FeatureFrame, eval_months) -> list[PredRecord]:
    """Fit on all rows strictly before each evaluation month, predict it.

    A training row additionally requires its label to have been public on the
    evaluation row's information date (binding in real-time mode only), so
    nothing dated after the nowcast can influence the fit.  Months absent
    from the frame are skipped; a present month with no earlier training rows
    is an error.  Every month gets a fresh fit, so no state can leak between
    steps.
    """
    out = []
    frame_months = set(int(m) for m in frame.months)
    label_dates = np.array(frame.label_dates)
    for month in sorted(set(int(m) for m in eval_months)):
        if month not in frame_months:
            continue
        row = frame.row_index(month)
        info = frame.info_dates[row]
        train = np.flatnonzero((frame.months < month) & (label_dates <= info))
        if train.size == 0:
            raise DataError(
                f"expanding_window_eval: no training rows before {month_to_str(month)}"
            )
        handle = model_spec.fit(frame.select_rows(train))
        pred = float(handle.predict(frame.X[row : row + 1])[0])
        out.append(PredRecord(month, pred, float(frame.y[row])))
    return out


@dataclass
class GridRow:
    params: dict
    fold_rmses: list[float]
    mean_rmse: float
    chosen: bool = False


@dataclass
class GridResult:
    rows: list[GridRow] = field(default_factory=list)

    @property
    def best(self) -> GridRow:
        return next(row for row in self.rows if row.chosen)

    def write_csv(self, path) -> None:
        if not self.rows:
            raise DataError("grid result is empty")
        k = len(self.rows[0].fold_rmses)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["params", *(f"fold{i}_rmse" for i in range(k)), "mean_rmse", "chosen"]
            )
            for row in self.rows:
                params = ";".join(f"{key}={row.params[key]}" for key in row.params)
                writer.writerow(
                    [params, *(repr(v) for v in row.fold_rmses), repr(row.mean_rmse),
                     int(row.chosen)]
                )


def expand_grid(grid: dict[str, list]) -> list[dict]:
    """Cartesian product in declaration order of keys and values.  An empty
    grid means a single all-defaults combination (the untuned-model case)."""
    if not grid:
        return [{}]
    keys = list(grid)
    for key in keys:
        if not grid[key]:
            raise ConfigError(f"grid search: dimension {key!r} has no values")
    combos = []
    for values in itertools.product(*(grid[key] for key in keys)):
        combos.append(dict(zip(keys, values)))
    return combos


def grid_search_cv(make_spec, grid: dict[str, list], frame: FeatureFrame, plan: CvPlan) -> GridResult:
    """Evaluate every parameter combination over the k sampled folds.

    ``make_spec(params)`` must return an object with ``fit(frame) -> handle``.
    The fold subsets are sampled once and shared across combinations.
    """
    combos = expand_grid(grid)
    folds = [sample_validation_subset(plan, f) for f in range(plan.k)]
    for f, months in enumerate(folds):
        usable = [m for m in months if m in set(int(x) for x in frame.months)]
        if not usable:
            raise DataError(f"grid search: fold {f} has no valid evaluation months")

    result = GridResult()
    for params in combos:
        spec = make_spec(params)
        fold_rmses = []
        for months in folds:
            records = expanding_window_eval(spec, frame, months)
            if not records:
                raise DataError("grid search: fold produced no predictions")
            fold_rmses.append(
                rmse([r.prediction for r in records], [r.actual for r in records])
            )
        result.rows.append(GridRow(params, fold_rmses, float(np.mean(fold_rmses))))

    best = min(range(len(result.rows)), key=lambda i: result.rows[i].mean_rmse)
    result.rows[best].chosen = True
    return result

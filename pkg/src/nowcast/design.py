"""Design-matrix assembly: horizon lag structures, the aligned feature frame,
and column standardization.

A frame row for nowcast month t is stamped with the calendar date the nowcast
would have been made (``info_date``).  In real-time mode every value in the
row is queried from the vintage store as of that date, and payment-stream
seasonal adjustment is recomputed recursively with only the data visible
then, so nothing released later can reach the row.  Latest-vintage mode keeps
the same reference-month lag structure but reads revised values (the target
and its lag are the only revisable series in practice).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .months import month_first_day, month_to_str
from .series import MonthlySeries, seasonal_adjust_lite, yoy_growth
from .vintages import LATEST, VintageStore


@dataclass(frozen=True)
class HorizonSpec:
    """Lag offsets per predictor group for one nowcasting horizon.

    ``offset`` is how many months after the nowcast month the prediction is
    made (0, 1, 2); the lag fields say which reference month of each group
    enters the row for nowcast month t.
    """

    name: str
    offset: int
    target_lag: int
    slow_lag: int      # price/labor indicators, released mid next month
    fast_lag: int      # sentiment/stress indicators, released next day
    payments_lag: int

    @staticmethod
    def for_horizon(name: str) -> "HorizonSpec":
        try:
            return _HORIZONS[name]
        except KeyError:
            raise DataError(f"unknown horizon {name!r}: expected one of {sorted(_HORIZONS)}")


_HORIZONS = {
    "t": HorizonSpec("t", 0, 3, 2, 1, 1),
    "t+1": HorizonSpec("t+1", 1, 2, 1, 0, 0),
    "t+2": HorizonSpec("t+2", 2, 1, 0, 0, 0),
}


@dataclass(frozen=True)
class FrameSpec:
    """Which store series play which role when building a frame."""

    target: str
    slow_indicators: tuple[str, ...] = ("cpi", "une")
    fast_indicators: tuple[str, ...] = ("cfsi", "cbcc")
    payments: tuple[str, ...] = ()


@dataclass(frozen=True)
class FeatureFrame:
    """Aligned design matrix with per-row information dates.

    X and y contain no NaN; months are strictly ascending; ``payment_features``
    marks the columns eligible for k-best stream selection.  ``label_dates``
    records when each row's label became public (real-time mode: the first
    release date; latest mode: the beginning of time), so expanding-window
    training can honor full as-of discipline for the labels too.
    """

    months: np.ndarray = field(repr=False)
    feature_names: tuple[str, ...]
    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    info_dates: tuple[dt.date, ...] = field(repr=False)
    payment_features: tuple[str, ...] = ()
    label_dates: tuple[dt.date, ...] | None = None

    def __post_init__(self):
        if self.label_dates is None:
            object.__setattr__(
                self, "label_dates", tuple(dt.date.min for _ in range(len(self.info_dates)))
            )
        months = np.asarray(self.months, dtype=np.int64)
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if X.shape != (months.size, len(self.feature_names)):
            raise DataError("frame: X shape does not match months x feature_names")
        if y.shape != (months.size,):
            raise DataError("frame: y length does not match months")
        if len(self.info_dates) != months.size:
            raise DataError("frame: info_dates length does not match months")
        if len(self.label_dates) != months.size:
            raise DataError("frame: label_dates length does not match months")
        if months.size and np.any(np.diff(months) <= 0):
            raise DataError("frame: months must be strictly ascending")
        if np.isnan(X).any() or np.isnan(y).any():
            raise DataError("frame: NaN in X or y")
        unknown = set(self.payment_features) - set(self.feature_names)
        if unknown:
            raise DataError(f"frame: payment_features not in feature_names: {sorted(unknown)}")
        for arr in (months, X, y):
            arr.flags.writeable = False
        object.__setattr__(self, "months", months)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.months.size

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.X[:, self.feature_names.index(name)]
        except ValueError:
            raise DataError(f"frame: unknown feature {name!r}") from None

    def row_index(self, month: int) -> int:
        pos = int(np.searchsorted(self.months, month))
        if pos >= len(self) or self.months[pos] != month:
            raise DataError(f"frame: no row for month {month_to_str(month)}")
        return pos

    def select_rows(self, rows) -> "FeatureFrame":
        rows = np.asarray(rows)
        return FeatureFrame(
            self.months[rows],
            self.feature_names,
            self.X[rows],
            self.y[rows],
            tuple(self.info_dates[int(i)] for i in rows),
            self.payment_features,
            tuple(self.label_dates[int(i)] for i in rows),
        )

    def select_columns(self, names: tuple[str, ...]) -> "FeatureFrame":
        idx = [self.feature_names.index(n) for n in names]
        return FeatureFrame(
            self.months,
            tuple(names),
            self.X[:, idx],
            self.y,
            self.info_dates,
            tuple(n for n in names if n in self.payment_features),
            self.label_dates,
        )


@dataclass(frozen=True)
class ColumnStats:
    """Per-column centering/scaling statistics (population sd, ddof=0)."""

    feature_names: tuple[str, ...]
    means: np.ndarray
    sds: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.means) / self.sds


def standardize(frame: FeatureFrame, fit_rows=None) -> tuple[FeatureFrame, ColumnStats]:
    """Center and scale every X column using statistics from ``fit_rows`` only.

    ``fit_rows`` defaults to all rows.  A zero-variance column over the fit
    rows is an error naming the column; the returned stats allow applying the
    identical transform to any other matrix (no leakage from later rows).
    """
    rows = np.arange(len(frame)) if fit_rows is None else np.asarray(fit_rows)
    if rows.size == 0:
        raise DataError("standardize: fit_rows is empty")
    sub = frame.X[rows]
    means = sub.mean(axis=0)
    sds = sub.std(axis=0)
    dead = np.flatnonzero(sds == 0.0)
    if dead.size:
        raise DataError(f"standardize: zero-variance column {frame.feature_names[int(dead[0])]!r}")
    stats = ColumnStats(frame.feature_names, means, sds)
    out = FeatureFrame(
        frame.months, frame.feature_names, stats.apply(frame.X), frame.y,
        frame.info_dates, frame.payment_features,
    )
    return out, stats


def _sa_yoy_value(levels: MonthlySeries, sa_asof: int, want: int) -> float | None:
    """Seasonally adjust up to sa_asof, take YOY growth, read month ``want``."""
    if sa_asof - levels.trim_missing().start + 1 < 36:
        return None
    adj = seasonal_adjust_lite(levels, sa_asof)
    if adj.end - adj.start < 12 or not adj.start + 12 <= want <= adj.end:
        return None
    return yoy_growth(adj).at(want)


def _yoy_value(levels: MonthlySeries, want: int) -> float | None:
    s = levels.trim_missing()
    if not s.start + 12 <= want <= s.end:
        return None
    return yoy_growth(s).at(want)


def build_design_matrix(
    store: VintageStore,
    spec: FrameSpec,
    horizon: HorizonSpec,
    asof: dt.date = LATEST,
    vintage: str = "realtime",
) -> FeatureFrame:
    """Assemble one row per nowcastable month; drop rows with any missing lag.

    Target, price/labor indicators and payments enter as YOY growth (payments
    after recursive seasonal adjustment); sentiment indicators enter as
    levels.  ``asof`` caps the information dates; vintage mode is "realtime"
    (first releases, row values knowable at info_date) or "latest" (revised
    values, same lag structure).
    """
    if vintage not in ("realtime", "latest"):
        raise DataError(f"unknown vintage mode {vintage!r}")

    names = (
        [f"{spec.target}_lag"]
        + list(spec.slow_indicators)
        + list(spec.fast_indicators)
        + list(spec.payments)
    )

    target_months = store.ref_months(spec.target)
    if not target_months:
        raise DataError(f"no data for target {spec.target!r}")

    latest_levels: dict[str, MonthlySeries] = {}
    if vintage == "latest":
        for name in [spec.target, *spec.slow_indicators, *spec.fast_indicators, *spec.payments]:
            latest_levels[name] = store.series_asof(name)

    rows, months, infos, ys, label_dates = [], [], [], [], []
    for t in range(target_months[0], target_months[-1] + 1):
        info = month_first_day(t + horizon.offset)
        if info > asof:
            break
        qdate = info if vintage == "realtime" else LATEST

        # The label is the target's YOY growth for month t.  It is never
        # knowable at info_date; real-time evaluation scores against first
        # releases (denominator as revised when that release came out),
        # latest mode against fully revised values.
        if vintage == "realtime":
            first = store.first_release(spec.target, t)
            if first is None:
                continue
            label_date, level_t = first
            base = store.asof(spec.target, t - 12, label_date)
        else:
            label_date = dt.date.min
            level_t = store.asof(spec.target, t, LATEST)
            base = store.asof(spec.target, t - 12, LATEST)
        if level_t is None or base is None or base == 0.0:
            continue
        y_val = 100.0 * (level_t / base - 1.0)

        def levels_of(name: str) -> MonthlySeries | None:
            if vintage == "latest":
                return latest_levels[name]
            try:
                return store.series_asof(name, qdate)
            except DataError:
                return None

        row: list[float | None] = []

        tgt = levels_of(spec.target)
        row.append(None if tgt is None else _yoy_value(tgt, t - horizon.target_lag))
        for name in spec.slow_indicators:
            s = levels_of(name)
            row.append(None if s is None else _yoy_value(s, t - horizon.slow_lag))
        for name in spec.fast_indicators:
            s = levels_of(name)
            want = t - horizon.fast_lag
            row.append(s.at(want) if s is not None and s.has(want) else None)
        for name in spec.payments:
            s = levels_of(name)
            if s is None:
                row.append(None)
                continue
            # seasonal adjustment is recursive in both modes: only data with
            # reference months known by info_date enters the estimate
            sa_asof = min(s.end, t + horizon.offset - 1)
            row.append(_sa_yoy_value(s, sa_asof, t - horizon.payments_lag))

        if any(v is None for v in row):
            continue

        rows.append([float(v) for v in row])
        months.append(t)
        infos.append(info)
        ys.append(float(y_val))
        label_dates.append(label_date)

    if not rows:
        raise DataError(
            f"empty frame for target {spec.target!r} at horizon {horizon.name}: "
            "no month has all required lags available"
        )
    return FeatureFrame(
        np.array(months, dtype=np.int64),
        tuple(names),
        np.array(rows),
        np.array(ys),
        tuple(infos),
        tuple(spec.payments),
        tuple(label_dates),
    )

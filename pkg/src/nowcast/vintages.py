"""Vintage-aware data store and the long-format series CSV it round-trips.

Every datum is a (series, reference month, release date, value) record; an
as-of query returns the latest release on or before a date.  Latest-vintage
mode is simply an as-of query at +infinity, so the real-time and revised
evaluation paths share one code path.
"""

from __future__ import annotations

import csv
import datetime as dt
from bisect import bisect_right, insort

import numpy as np

from .errors import DataError
from .months import month_from_str, month_to_str, parse_date
from .series import MonthlySeries

CSV_HEADER = ["series", "ref_month", "release_date", "value"]

#: sentinel as-of date meaning "latest vintage"
LATEST = dt.date.max


class VintageStore:
    """Map (series, reference month) -> ordered releases.

    Append-only while loading; treat as immutable afterwards (concurrent
    readers are safe).
    """

    def __init__(self):
        self._entries: dict[tuple[str, int], list[tuple[dt.date, float]]] = {}
        self._months: dict[str, list[int]] = {}

    def add(self, series: str, ref_month: int, release_date: dt.date, value: float) -> None:
        key = (series, ref_month)
        if key not in self._entries:
            insort(self._months.setdefault(series, []), ref_month)
        releases = self._entries.setdefault(key, [])
        if releases and release_date <= releases[-1][0]:
            if any(d == release_date for d, _ in releases):
                raise DataError(
                    f"duplicate release for ({series}, {month_to_str(ref_month)}, {release_date})"
                )
            raise DataError(
                f"out-of-order release for ({series}, {month_to_str(ref_month)}): "
                f"{release_date} after {releases[-1][0]}"
            )
        releases.append((release_date, float(value)))

    def add_series(
        self, s: MonthlySeries, release_lag_months: int = 1, release_day: int = 1
    ) -> None:
        """Register a plain series with a uniform publication schedule: the
        value for month m is released on ``release_day`` of m + lag."""
        for m in s.month_range():
            if not s.has(m):
                continue
            rel = m + release_lag_months
            self.add(s.name, m, dt.date(rel // 12, rel % 12 + 1, release_day), s.at(m))

    def series_names(self) -> list[str]:
        return sorted({name for name, _ in self._entries})

    def ref_months(self, series: str) -> list[int]:
        return list(self._months.get(series, []))

    def first_release(self, series: str, ref_month: int) -> tuple[dt.date, float] | None:
        releases = self._entries.get((series, ref_month))
        return None if not releases else releases[0]

    def asof(self, series: str, ref_month: int, asof: dt.date = LATEST) -> float | None:
        """Latest release of (series, ref_month) on or before ``asof``."""
        releases = self._entries.get((series, ref_month))
        if not releases:
            return None
        pos = bisect_right(releases, asof, key=lambda r: r[0])
        if pos == 0:
            return None
        return releases[pos - 1][1]

    def series_asof(self, series: str, asof: dt.date = LATEST) -> MonthlySeries:
        """Assemble the contiguous series visible at ``asof``.

        Starts at the earliest reference month with a visible release and
        stops before the first gap, so the result satisfies the no-internal-
        gap series invariant.
        """
        months = self._months.get(series)
        if not months:
            raise DataError(f"no data for series {series!r}")
        vals, start = [], None
        for m in range(months[0], months[-1] + 1):
            v = self.asof(series, m, asof)
            if v is None:
                if start is None:
                    continue
                break
            if start is None:
                start = m
            vals.append(v)
        if start is None:
            raise DataError(f"series {series!r}: nothing released on or before {asof}")
        return MonthlySeries(series, start, np.array(vals))

    def records(self):
        """All records sorted by (series, ref month, release date)."""
        for (series, month) in sorted(self._entries):
            for release_date, value in self._entries[(series, month)]:
                yield series, month, release_date, value

    def __eq__(self, other):
        return isinstance(other, VintageStore) and self._entries == other._entries

    def __len__(self):
        return sum(len(v) for v in self._entries.values())


def vintage_asof(
    store: VintageStore, series: str, ref_month: int, asof: dt.date = LATEST
) -> float | None:
    return store.asof(series, ref_month, asof)


def parse_series_csv(path) -> VintageStore:
    """Load a long-format series CSV: ``series,ref_month,release_date,value``."""
    store = VintageStore()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise DataError(f"{path}: bad header {header!r}, expected {CSV_HEADER}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            series, ref, rel, val = (f.strip() for f in row)
            try:
                month = month_from_str(ref)
                release = parse_date(rel)
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            try:
                value = float(val)
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric value {val!r}") from None
            if not np.isfinite(value):
                raise DataError(f"{path}:{lineno}: non-finite value {val!r}")
            try:
                store.add(series, month, release, value)
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    return store


def write_series_csv(store: VintageStore, path) -> None:
    """Inverse of parse_series_csv; record order is canonical so equal stores
    serialize to identical bytes."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for series, month, release_date, value in store.records():
            writer.writerow([series, month_to_str(month), release_date.isoformat(), repr(value)])

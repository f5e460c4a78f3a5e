"""Core monthly-series type and the level -> growth-rate transforms.

Everything here is a pure function: series are immutable after construction
and transforms never look past the ``asof`` month they were given, which is
what makes the real-time (no-leakage) guarantees of the feature builder hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .months import calendar_month, month_to_str


@dataclass(frozen=True)
class MonthlySeries:
    """One named monthly series of levels with a contiguous month index.

    ``start`` is the absolute month index of ``values[0]``.  Values are
    float64; NaN is allowed only as a leading run (no internal gaps).
    """

    name: str
    start: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 1:
            raise DataError(f"series {self.name!r}: values must be a nonempty 1-D array")
        present = ~np.isnan(vals)
        if not present[-1]:
            raise DataError(f"series {self.name!r}: trailing missing values not allowed")
        first = int(np.argmax(present))
        if np.isnan(vals[first:]).any():
            raise DataError(f"series {self.name!r}: missing value follows a present value")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    @property
    def end(self) -> int:
        """Last month covered (inclusive)."""
        return self.start + len(self) - 1

    def month_range(self) -> range:
        return range(self.start, self.end + 1)

    def at(self, month: int) -> float:
        if not self.start <= month <= self.end:
            raise DataError(
                f"series {self.name!r}: month {month_to_str(month)} outside "
                f"[{month_to_str(self.start)}, {month_to_str(self.end)}]"
            )
        return float(self.values[month - self.start])

    def has(self, month: int) -> bool:
        if not self.start <= month <= self.end:
            return False
        return not np.isnan(self.values[month - self.start])

    def trim_missing(self) -> "MonthlySeries":
        """Drop the leading NaN run."""
        present = ~np.isnan(self.values)
        first = int(np.argmax(present))
        if first == 0:
            return self
        return MonthlySeries(self.name, self.start + first, self.values[first:])

    def truncate(self, asof_month: int) -> "MonthlySeries":
        """Keep months <= asof_month."""
        if asof_month < self.start:
            raise DataError(f"series {self.name!r}: truncation before series start")
        keep = min(asof_month, self.end) - self.start + 1
        return MonthlySeries(self.name, self.start, self.values[:keep])

    def rename(self, name: str) -> "MonthlySeries":
        return MonthlySeries(name, self.start, self.values)


def yoy_growth(s: MonthlySeries) -> MonthlySeries:
    """Year-over-year growth in percentage points: 100 * (x[t] / x[t-12] - 1).

    The first full year of data is consumed, so the output starts 12 months
    after the input.  A zero 12-months-ago level is a hard error, not NaN.
    """
    s = s.trim_missing()
    if len(s) < 13:
        raise DataError(f"series {s.name!r}: need >= 13 months for YOY growth, have {len(s)}")
    base = s.values[:-12]
    cur = s.values[12:]
    zero = base == 0.0
    if zero.any():
        bad = s.start + int(np.argmax(zero))
        raise DataError(f"series {s.name!r}: zero level at {month_to_str(bad)} in YOY denominator")
    return MonthlySeries(s.name, s.start + 12, 100.0 * (cur / base - 1.0))


def seasonal_adjust_lite(s: MonthlySeries, asof: int) -> MonthlySeries:
    """Classical multiplicative seasonal adjustment using only data <= asof.

    trend = centered 2x12 moving average; monthly indices = per-calendar-month
    mean of value/trend ratios, normalized to mean 1; output = value / index.
    Causal by construction: months after ``asof`` never enter the estimate.
    """
    s = s.trim_missing()
    if asof > s.end:
        asof = s.end
    n = asof - s.start + 1
    if n < 36:
        raise DataError(
            f"series {s.name!r}: seasonal adjustment needs >= 36 months up to "
            f"{month_to_str(asof)}, have {max(n, 0)}"
        )
    d = s.values[:n]
    if (d <= 0.0).any():
        bad = s.start + int(np.argmax(d <= 0.0))
        raise DataError(f"series {s.name!r}: nonpositive level at {month_to_str(bad)}")

    # centered 2x12 MA: trend[t] spans t-6..t+6 with half weight at the ends
    w = np.full(13, 1.0 / 12.0)
    w[0] = w[-1] = 1.0 / 24.0
    trend = np.convolve(d, w, mode="valid")  # length n - 12, aligned to t = 6..n-7
    ratio = d[6 : n - 6] / trend

    cal = (np.arange(s.start + 6, s.start + n - 6) % 12) + 1
    idx = np.empty(12)
    for m in range(1, 13):
        sel = cal == m
        if not sel.any():  # n >= 36 guarantees coverage; keep a clear error anyway
            raise DataError(f"series {s.name!r}: no trend coverage for calendar month {m}")
        idx[m - 1] = ratio[sel].mean()
    idx *= 12.0 / idx.sum()

    cal_all = (np.arange(s.start, s.start + n) % 12) + 1
    return MonthlySeries(s.name, s.start, d / idx[cal_all - 1])


@dataclass(frozen=True)
class MergeRule:
    """One derived stream: name = sum(plus) - sum(minus).

    Rules are applied in order and may reference outputs of earlier rules,
    which is how the all-streams total is expressed as a plain rule.
    """

    name: str
    plus: tuple[str, ...]
    minus: tuple[str, ...] = ()


def parse_ruleset(text: str) -> list[MergeRule]:
    """Parse merge rules from lines like ``E = E + L + O - S - U``.

    Blank lines and ``#`` comments are ignored.
    """
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"ruleset line {lineno}: expected 'name = a + b - c', got {raw!r}")
        name, expr = line.split("=", 1)
        name = name.strip()
        plus, minus = [], []
        sign = +1
        for token in expr.replace("+", " + ").replace("-", " - ").split():
            if token == "+":
                sign = +1
            elif token == "-":
                sign = -1
            else:
                (plus if sign > 0 else minus).append(token)
                sign = +1
        if not name or not plus:
            raise DataError(f"ruleset line {lineno}: rule needs a name and at least one + term")
        rules.append(MergeRule(name, tuple(plus), tuple(minus)))
    return rules


def aggregate_streams(
    streams: dict[str, MonthlySeries], rules: list[MergeRule]
) -> dict[str, MonthlySeries]:
    """Apply merge rules over the overlapping coverage of their inputs.

    Output maps rule names to merged series.  Each rule sees the outputs of
    earlier rules in addition to the raw inputs.
    """
    pool = dict(streams)
    out: dict[str, MonthlySeries] = {}
    for rule in rules:
        terms = list(rule.plus) + list(rule.minus)
        missing = [t for t in terms if t not in pool]
        if missing:
            raise DataError(f"rule {rule.name!r} references unknown stream(s): {missing}")
        parts = [pool[t].trim_missing() for t in terms]
        start = max(p.start for p in parts)
        end = min(p.end for p in parts)
        if end < start:
            raise DataError(f"rule {rule.name!r}: inputs have no overlapping coverage")
        total = np.zeros(end - start + 1)
        for t in rule.plus:
            p = pool[t].trim_missing()
            total += p.values[start - p.start : end - p.start + 1]
        for t in rule.minus:
            p = pool[t].trim_missing()
            total -= p.values[start - p.start : end - p.start + 1]
        merged = MonthlySeries(rule.name, start, total)
        out[rule.name] = merged
        pool[rule.name] = merged
    return out

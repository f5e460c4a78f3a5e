"""Seeded synthetic economy with payment streams and macro targets.

The latent variable is a year-over-year activity growth rate following
regime-dependent means (a slow business-cycle wave in normal times, deep
negative profiles in the two crisis flavors) plus a stationary AR(1)
deviation.  Payment streams load linearly on activity and are integrated into
strictly positive level series with a mildly drifting multiplicative seasonal
pattern; one government-support stream responds *positively* during
covid-like regimes while activity collapses.  Targets respond to activity
with an extra multiplier on negative values (the asymmetry coefficient), so
crisis months are sharply below the normal distribution and the dependence of
the target on any single stream has a known kinked ground truth.

Everything is a pure function of (scenario, seed): a fixed draw order makes
output bit-identical across runs.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .months import month_from_str
from .series import MergeRule, MonthlySeries
from .vintages import VintageStore

REGIME_KINDS = ("normal", "gfc_like", "covid_like")


@dataclass(frozen=True)
class StreamSpec:
    name: str
    loading: float
    noise_sd: float
    response: str = "procyclical"  # or "support": rises during covid-like regimes
    seasonal_amp: float = 0.05


def default_streams() -> tuple[StreamSpec, ...]:
    """Seven retail-style streams plus two wholesale tranches.  M is the
    government-support stream; E carries the largest activity loading."""
    return (
        StreamSpec("C_raw", 0.8, 1.5),
        StreamSpec("M", 0.3, 1.4, response="support"),
        StreamSpec("D", 0.9, 1.6),
        StreamSpec("E", 1.3, 1.3),
        StreamSpec("N", 0.7, 2.0, seasonal_amp=0.08),
        StreamSpec("P", 1.1, 1.5, seasonal_amp=0.07),
        StreamSpec("X", 1.0, 1.8),
        StreamSpec("T1", 0.5, 2.5, seasonal_amp=0.02),
        StreamSpec("T2", 0.6, 2.2, seasonal_amp=0.02),
    )


@dataclass(frozen=True)
class EconomyScenario:
    months: int = 240
    start: int = month_from_str("2003-01")
    regimes: tuple[tuple[int, str], ...] = (
        (0, "normal"),
        (60, "gfc_like"),
        (72, "normal"),
        (230, "covid_like"),
    )
    streams: tuple[StreamSpec, ...] = field(default_factory=default_streams)
    asymmetry: float = 2.0
    base_growth: float = 3.0
    cycle_amp: float = 1.2
    cycle_period: int = 72
    activity_noise_sd: float = 0.9
    activity_persistence: float = 0.7
    support_boost: float = 28.0
    seasonal_drift: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.months < 60:
            raise DataError(f"scenario: need >= 60 months, got {self.months}")
        if self.asymmetry < 1.0:
            raise DataError(f"scenario: asymmetry must be >= 1, got {self.asymmetry}")
        starts = [s for s, _ in self.regimes]
        if starts != sorted(starts) or len(set(starts)) != len(starts):
            raise DataError("scenario: regime starts must be strictly increasing")
        if not self.regimes or self.regimes[0][0] != 0:
            raise DataError("scenario: first regime must start at month 0")
        for s, kind in self.regimes:
            if kind not in REGIME_KINDS:
                raise DataError(f"scenario: unknown regime kind {kind!r}")
            if not 0 <= s < self.months:
                raise DataError(f"scenario: regime start {s} outside 0..{self.months - 1}")
        for spec in self.streams:
            if spec.noise_sd < 0:
                raise DataError(f"scenario: stream {spec.name!r} noise sd must be >= 0")
            if spec.response not in ("procyclical", "support"):
                raise DataError(f"scenario: bad response {spec.response!r}")


@dataclass
class EconomyTruth:
    activity: MonthlySeries  # latent YOY activity growth, percent
    regime_of_month: dict[int, str]
    crisis_months: dict[str, list[int]]
    asymmetry: float
    support_stream: str
    asymmetric_stream: str
    loadings: dict[str, float]


@dataclass
class SyntheticEconomy:
    streams: dict[str, MonthlySeries]     # raw levels, value + volume per stream
    indicators: dict[str, MonthlySeries]  # cpi, une (levels), cfsi, cbcc (indices)
    targets: dict[str, MonthlySeries]     # gdp, rts, wts levels
    truth: EconomyTruth


def _regime_path(scn: EconomyScenario) -> tuple[list[str], np.ndarray]:
    kinds = []
    pos = np.zeros(scn.months, dtype=np.int64)
    length = np.zeros(scn.months, dtype=np.int64)
    bounds = list(scn.regimes) + [(scn.months, "normal")]
    for (s, kind), (nxt, _) in zip(bounds[:-1], bounds[1:]):
        for t in range(s, min(nxt, scn.months)):
            kinds.append(kind)
            pos[t] = t - s
            length[t] = min(nxt, scn.months) - s
    means = np.empty(scn.months)
    for t, kind in enumerate(kinds):
        if kind == "normal":
            means[t] = scn.base_growth + scn.cycle_amp * np.sin(
                2.0 * np.pi * t / scn.cycle_period
            )
        else:
            frac = pos[t] / max(length[t], 1)
            if kind == "gfc_like":
                means[t] = -9.0 + 4.0 * frac
            else:  # covid_like: deeper trough, faster rebound
                means[t] = -18.0 + 12.0 * frac
    return kinds, means


def _integrate_levels(name: str, start: int, growth: np.ndarray, base: float,
                      seed_growth: float = 0.25) -> MonthlySeries:
    """Build a level series whose YOY growth equals ``growth`` from month 12 on."""
    n = growth.size
    log_level = np.empty(n)
    for t in range(12):
        log_level[t] = np.log(base) + t * np.log1p(seed_growth / 100.0)
    for t in range(12, n):
        g = growth[t]
        if g <= -100.0:
            raise DataError(f"{name}: growth {g:.1f}% at month {t} not integrable")
        log_level[t] = log_level[t - 12] + np.log1p(g / 100.0)
    return MonthlySeries(name, start, np.exp(log_level))


def generate_economy(scn: EconomyScenario) -> SyntheticEconomy:
    rng = np.random.default_rng(scn.seed)
    n = scn.months
    kinds, means = _regime_path(scn)

    # stationary AR(1) deviations around the regime mean
    eps = rng.normal(0.0, 1.0, size=n) * scn.activity_noise_sd
    v = np.zeros(n)
    for t in range(n):
        v[t] = scn.activity_persistence * (v[t - 1] if t else 0.0) + eps[t]
    activity = means + v

    neg = activity < 0.0
    asym_activity = np.where(neg, scn.asymmetry * activity, activity)

    targets = {}
    for name, scale, noise_sd, base in (
        ("gdp", 0.55, 0.80, 100.0),
        ("rts", 0.70, 1.20, 80.0),
        ("wts", 0.65, 1.00, 90.0),
    ):
        noise = rng.normal(0.0, 1.0, size=n) * noise_sd
        targets[name] = _integrate_levels(name, scn.start, scale * asym_activity + noise, base)

    # benchmark indicators: informative in normal times but noisy and mostly
    # lagged, so they trail the payment streams at crisis onsets
    lag1 = np.concatenate([[activity[0]], activity[:-1]])
    cpi_growth = 2.0 + 0.15 * lag1 + rng.normal(0.0, 1.0, size=n) * 0.3
    une_growth = -0.9 * lag1 + rng.normal(0.0, 1.0, size=n) * 0.8
    indicators = {
        "cpi": _integrate_levels("cpi", scn.start, cpi_growth, 100.0, seed_growth=0.17),
        "une": _integrate_levels("une", scn.start, une_growth, 7.0, seed_growth=0.0),
        "cfsi": MonthlySeries(
            "cfsi", scn.start,
            0.30 - 0.022 * (0.4 * activity + 0.6 * lag1)
            + rng.normal(0.0, 1.0, size=n) * 0.10,
        ),
        "cbcc": MonthlySeries(
            "cbcc", scn.start,
            100.0 + 1.4 * (0.3 * activity + 0.7 * lag1) + rng.normal(0.0, 1.0, size=n) * 5.0,
        ),
    }

    covid = np.array([k == "covid_like" for k in kinds], dtype=np.float64)
    month_in_year = (scn.start + np.arange(n)) % 12
    streams: dict[str, MonthlySeries] = {}
    for spec in scn.streams:
        phase = sum(ord(c) for c in spec.name) % 12  # stable across processes
        pattern = np.sin(2.0 * np.pi * (month_in_year + phase) / 12.0)
        amp = spec.seasonal_amp * (1.0 + scn.seasonal_drift * np.arange(n) / max(n - 1, 1))
        seasonal = 1.0 + amp * pattern
        for kind, load_mult, support_mult, base in (
            ("value", 1.0, 1.0, 50.0),
            ("volume", 0.85, 0.7, 10.0),
        ):
            noise = rng.normal(0.0, 1.0, size=n) * spec.noise_sd
            growth = spec.loading * load_mult * activity + noise
            if spec.response == "support":
                growth = growth + scn.support_boost * support_mult * covid
            core = _integrate_levels(f"{spec.name}_{kind}", scn.start, growth, base)
            streams[core.name] = MonthlySeries(core.name, scn.start, core.values * seasonal)

    crisis: dict[str, list[int]] = {"gfc_like": [], "covid_like": []}
    regime_of_month = {}
    for t, kind in enumerate(kinds):
        regime_of_month[scn.start + t] = kind
        if kind != "normal":
            crisis[kind].append(scn.start + t)

    truth = EconomyTruth(
        activity=MonthlySeries("activity", scn.start, activity),
        regime_of_month=regime_of_month,
        crisis_months=crisis,
        asymmetry=scn.asymmetry,
        support_stream="M",
        asymmetric_stream="E",
        loadings={s.name: s.loading for s in scn.streams},
    )
    return SyntheticEconomy(streams, indicators, targets, truth)


def default_merge_rules(kinds: tuple[str, ...] = ("value", "volume")) -> list[MergeRule]:
    """Stream consolidation mirroring how split-off instruments are folded
    back: C absorbs the government direct-deposit stream M, the others pass
    through unchanged, and All is the sum of the six retail streams per kind.
    The wholesale tranches T1/T2 stay outside the All total."""
    rules: list[MergeRule] = []
    for k in kinds:
        rules.append(MergeRule(f"C_{k}", (f"C_raw_{k}", f"M_{k}")))
        for sid in ("D", "E", "N", "P", "X", "T1", "T2"):
            rules.append(MergeRule(f"{sid}_{k}", (f"{sid}_{k}",)))
        rules.append(
            MergeRule(f"All_{k}", tuple(f"{sid}_{k}" for sid in ("C", "D", "E", "N", "P", "X")))
        )
    return rules


def economy_to_store(
    economy: SyntheticEconomy,
    revision_sd: float = 0.01,
    revision_seed: int = 1,
) -> VintageStore:
    """Register everything with realistic release schedules.

    payments / cfsi / cbcc: final value on the 1st of the next month.
    cpi / une: final value on the 15th of the next month.
    targets: noisy first release on the 15th two months after the reference
    month, revised to the true value six months later.
    """
    store = VintageStore()
    for s in economy.streams.values():
        store.add_series(s, release_lag_months=1, release_day=1)
    for name in ("cfsi", "cbcc"):
        store.add_series(economy.indicators[name], release_lag_months=1, release_day=1)
    for name in ("cpi", "une"):
        store.add_series(economy.indicators[name], release_lag_months=1, release_day=15)
    rng = np.random.default_rng(revision_seed)
    for s in economy.targets.values():
        shocks = rng.normal(0.0, 1.0, size=len(s)) * revision_sd
        for j, m in enumerate(s.month_range()):
            first_rel = m + 2
            final_rel = m + 8
            truth = s.at(m)
            store.add(s.name, m, dt.date(first_rel // 12, first_rel % 12 + 1, 15),
                      truth * (1.0 + shocks[j]))
            store.add(s.name, m, dt.date(final_rel // 12, final_rel % 12 + 1, 15), truth)
    return store

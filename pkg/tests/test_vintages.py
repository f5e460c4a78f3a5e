import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nowcast.errors import DataError
from nowcast.months import month_from_str
from nowcast.vintages import (
    LATEST,
    VintageStore,
    parse_series_csv,
    vintage_asof,
    write_series_csv,
)

M = month_from_str


def test_parse_three_rows(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text(
        "series,ref_month,release_date,value\n"
        "gdp,2020-01,2020-03-15,1.0\n"
        "gdp,2020-02,2020-04-15,1.1\n"
        "gdp,2020-03,2020-05-15,1.2\n"
    )
    store = parse_series_csv(p)
    assert len(store) == 3
    assert store.asof("gdp", M("2020-02")) == 1.1


def test_two_releases_vintage_semantics(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text(
        "series,ref_month,release_date,value\n"
        "gdp,2020-01,2020-03-15,1.0\n"
        "gdp,2020-01,2020-09-15,1.1\n"
    )
    store = parse_series_csv(p)
    assert vintage_asof(store, "gdp", M("2020-01"), dt.date(2020, 5, 1)) == 1.0
    assert vintage_asof(store, "gdp", M("2020-01"), dt.date(2020, 3, 15)) == 1.0
    assert vintage_asof(store, "gdp", M("2020-01"), dt.date(2020, 3, 14)) is None
    assert vintage_asof(store, "gdp", M("2020-01")) == 1.1  # latest = asof(+inf)


def test_round_trip_thousand_rows(tmp_path):
    rng = np.random.default_rng(0)
    store = VintageStore()
    day = dt.date(2010, 1, 1)
    for i in range(1000):
        series = f"s{i % 7}"
        month = M("2010-01") + (i % 60)
        release = day + dt.timedelta(days=int(rng.integers(30, 400)) + (i // 7))
        try:
            store.add(series, month, release, float(rng.normal()))
        except DataError:
            pass  # collisions on (series, month, date) are rejected by design
    p = tmp_path / "round.csv"
    write_series_csv(store, p)
    again = parse_series_csv(p)
    assert again == store
    # serialize -> parse -> serialize is byte identical
    p2 = tmp_path / "round2.csv"
    write_series_csv(again, p2)
    assert p.read_bytes() == p2.read_bytes()


def test_duplicate_rejected_with_line(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text(
        "series,ref_month,release_date,value\n"
        "gdp,2020-01,2020-03-15,1.0\n"
        "gdp,2020-01,2020-03-15,1.0\n"
    )
    with pytest.raises(DataError, match=r":3:"):
        parse_series_csv(p)


@pytest.mark.parametrize(
    "row,msg",
    [
        ("gdp,2020-13,2020-03-15,1.0", "month"),
        ("gdp,2020-01,2020-03-99,1.0", "date"),
        ("gdp,2020-01,2020-03-15,abc", "non-numeric"),
    ],
)
def test_malformed_rows_name_line(tmp_path, row, msg):
    p = tmp_path / "s.csv"
    p.write_text("series,ref_month,release_date,value\n" + row + "\n")
    with pytest.raises(DataError, match=r":2:"):
        parse_series_csv(p)


def test_bad_header(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("a,b,c,d\n")
    with pytest.raises(DataError, match="header"):
        parse_series_csv(p)


def test_series_asof_contiguity():
    store = VintageStore()
    store.add("x", M("2020-01"), dt.date(2020, 2, 1), 1.0)
    store.add("x", M("2020-02"), dt.date(2020, 3, 1), 2.0)
    store.add("x", M("2020-04"), dt.date(2020, 5, 1), 4.0)  # gap at 2020-03
    s = store.series_asof("x")
    assert s.start == M("2020-01")
    assert len(s) == 2  # stops before the gap


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_asof_monotone(days):
    store = VintageStore()
    base = dt.date(2015, 6, 1)
    store.add("x", M("2015-01"), base, 1.0)
    store.add("x", M("2015-01"), base + dt.timedelta(days=200), 2.0)
    earlier = store.asof("x", M("2015-01"), base + dt.timedelta(days=days))
    later = store.asof("x", M("2015-01"), base + dt.timedelta(days=days + 1))
    assert not (earlier is not None and later is None)


def test_asof_brute_force_fixture():
    """latest-mode query equals a brute-force scan over all releases."""
    rng = np.random.default_rng(7)
    store = VintageStore()
    releases = {}
    for month in range(M("2018-01"), M("2018-01") + 24):
        dates = sorted(
            dt.date(2018, 1, 1) + dt.timedelta(days=int(d))
            for d in rng.choice(2000, size=3, replace=False)
        )
        releases[month] = [(d, float(rng.normal())) for d in dates]
        for d, v in releases[month]:
            store.add("z", month, d, v)
    for month, rel in releases.items():
        expected = max(rel, key=lambda r: r[0])[1]
        assert store.asof("z", month, LATEST) == expected

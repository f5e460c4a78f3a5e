import numpy as np
import pytest

from nowcast.config import RunConfig
from nowcast.design import FrameSpec, HorizonSpec, build_design_matrix
from nowcast.pipeline import prepare_store
from nowcast.series import aggregate_streams
from nowcast.synth import (
    EconomyScenario,
    default_merge_rules,
    economy_to_store,
    generate_economy,
)
from nowcast.vintages import VintageStore


def small_scenario(seed=0, months=132):
    """Compact economy: GFC-like crash mid-sample, covid-like into the end."""
    return EconomyScenario(
        months=months,
        regimes=((0, "normal"), (60, "gfc_like"), (70, "normal"), (months - 10, "covid_like")),
        seed=seed,
    )


def store_for(economy, revision_sd=0.01, seed=1):
    merged = aggregate_streams(economy.streams, default_merge_rules())
    store = VintageStore()
    for s in merged.values():
        store.add_series(s, release_lag_months=1, release_day=1)
    for name in ("cfsi", "cbcc"):
        store.add_series(economy.indicators[name], release_lag_months=1, release_day=1)
    for name in ("cpi", "une"):
        store.add_series(economy.indicators[name], release_lag_months=1, release_day=15)
    targets = economy_to_store(economy, revision_sd, revision_seed=seed)
    for series, month, release, value in targets.records():
        if series in economy.targets:
            store.add(series, month, release, value)
    return store, sorted(merged)


@pytest.fixture(scope="session")
def economy():
    return generate_economy(small_scenario(seed=0))


@pytest.fixture(scope="session")
def store_and_payments(economy):
    return store_for(economy)


@pytest.fixture(scope="session")
def frame(store_and_payments):
    store, payments = store_and_payments
    return build_design_matrix(
        store, FrameSpec("gdp", payments=tuple(payments)), HorizonSpec.for_horizon("t+1"),
        vintage="realtime",
    )


@pytest.fixture(scope="session")
def default_cfg():
    return RunConfig.from_mapping({"seed": "7"})


@pytest.fixture(scope="session")
def default_frame(default_cfg):
    store, payments, _crisis = prepare_store(default_cfg)
    frame = build_design_matrix(
        store,
        FrameSpec("gdp", payments=tuple(payments)),
        HorizonSpec.for_horizon("t+1"),
        vintage="latest",
    )
    return frame


def random_frame(n, m, seed=0, payments=()):
    """Plain numeric frame for solver tests."""
    from nowcast.design import FeatureFrame

    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, m))
    w = rng.normal(size=m)
    y = X @ w + rng.normal(scale=0.5, size=n)
    months = np.arange(24000, 24000 + n)
    from nowcast.months import month_first_day

    return FeatureFrame(
        months,
        tuple(f"f{i}" for i in range(m)),
        X,
        y,
        tuple(month_first_day(int(t) + 1) for t in months),
        tuple(payments),
    )

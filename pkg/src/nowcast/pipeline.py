"""End-to-end driver: data -> transforms -> design matrix -> grid search ->
expanding-window test predictions -> evaluation -> explanation -> files.

Every output file is written with repr() floats and no timestamps, so a rerun
with the same config and inputs is byte-identical.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__
from . import _kernels
from .config import RunConfig
from .crossval import CvPlan, GridResult, expanding_window_eval, grid_search_cv
from .design import FeatureFrame, FrameSpec, HorizonSpec, build_design_matrix
from .errors import ConfigError, DataError
from .metrics import display_reduction, dm_test, rmse, rmse_reduction, split_eval
from .months import month_from_str, month_to_str
from .models.registry import make_spec
from .selection import select_k_best  # noqa: F401  (re-exported for CLI convenience)
from .series import aggregate_streams, parse_ruleset
from .shapley import (
    EXACT_LIMIT,
    ShapExplanation,
    ValueFunction,
    exact_shapley,
    kernel_shap,
    write_importance_csv,
    write_shap_csv,
)
from .synth import EconomyScenario, default_merge_rules, economy_to_store, generate_economy
from .vintages import VintageStore, parse_series_csv

RESERVED_SERIES = ("gdp", "rts", "wts", "cpi", "une", "cfsi", "cbcc")

DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "ols": {},
    "enet": {"alpha": [0.001, 0.01, 0.1], "l1_ratio": [0.2, 0.5, 0.8], "k_best": [6, 18]},
    "svr": {"C": [1.0, 3.0], "eps": [0.1, 0.3], "k_best": [6, 18]},
    "rfr": {"n_estimators": [200], "max_depth": [2, 4], "k_best": [6, 18]},
    "gbr": {
        "n_estimators": [300],
        "learning_rate": [0.05, 0.1],
        "max_depth": [1, 2],
        "k_best": [6, 18],
    },
    "mlp": {"hidden": [3], "learning_rate": [0.05], "epochs": [800], "k_best": [6, 18]},
    "dfm": {"r": [2]},
}


def scenario_from_config(cfg: RunConfig) -> EconomyScenario:
    regimes = []
    for part in cfg.synth_regimes.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise ConfigError(f"synth_regimes: bad entry {part!r}, expected OFFSET:kind")
        off, kind = part.split(":", 1)
        try:
            regimes.append((int(off), kind.strip()))
        except ValueError:
            raise ConfigError(f"synth_regimes: bad offset in {part!r}")
    return EconomyScenario(
        months=cfg.synth_months,
        start=month_from_str(cfg.synth_start),
        regimes=tuple(regimes),
        asymmetry=cfg.synth_asymmetry,
        seed=cfg.seed,
    )


def prepare_store(cfg: RunConfig):
    """Returns (store, payment feature names, crisis month ranges)."""
    if cfg.data_mode == "synth":
        economy = generate_economy(scenario_from_config(cfg))
        merged = aggregate_streams(economy.streams, default_merge_rules())
        store = VintageStore()
        for s in merged.values():
            store.add_series(s, release_lag_months=1, release_day=1)
        for name in ("cfsi", "cbcc"):
            store.add_series(economy.indicators[name], release_lag_months=1, release_day=1)
        for name in ("cpi", "une"):
            store.add_series(economy.indicators[name], release_lag_months=1, release_day=15)
        target_store = economy_to_store(economy, cfg.synth_revision_sd, revision_seed=cfg.seed + 1)
        for series, month, release, value in target_store.records():
            if series in economy.targets:
                store.add(series, month, release, value)
        payments = sorted(merged)
        if cfg.crisis_ranges:
            crisis = {"crisis": cfg.crisis_ranges}
        else:
            crisis_months = sorted(m for ms in economy.truth.crisis_months.values() for m in ms)
            crisis = {"crisis": _to_ranges(crisis_months)} if crisis_months else {}
        return store, payments, crisis

    store = parse_series_csv(cfg.series_csv)
    if cfg.ruleset not in ("default", "none"):
        rules = parse_ruleset(Path(cfg.ruleset).read_text(encoding="utf-8"))
        levels = {name: store.series_asof(name) for name in store.series_names()
                  if name not in RESERVED_SERIES}
        merged = aggregate_streams(levels, rules)
        rebuilt = VintageStore()
        for series, month, release, value in store.records():
            if series in RESERVED_SERIES:
                rebuilt.add(series, month, release, value)
        for s in merged.values():
            rebuilt.add_series(s, release_lag_months=1, release_day=1)
        store = rebuilt
        payments = sorted(merged)
    else:
        payments = cfg.payment_series or [
            n for n in store.series_names() if n not in RESERVED_SERIES
        ]
    crisis = {"crisis": cfg.crisis_ranges} if cfg.crisis_ranges else {}
    return store, payments, crisis


def _to_ranges(months: list[int]) -> list[tuple[int, int]]:
    if not months:
        return []
    ranges = []
    start = prev = months[0]
    for m in months[1:]:
        if m == prev + 1:
            prev = m
            continue
        ranges.append((start, prev))
        start = prev = m
    ranges.append((start, prev))
    return ranges


def build_frame(cfg: RunConfig, store: VintageStore, payments: list[str]) -> FeatureFrame:
    spec = FrameSpec(target=cfg.target, payments=tuple(payments))
    horizon = HorizonSpec.for_horizon(cfg.horizon)
    return build_design_matrix(store, spec, horizon, vintage=cfg.vintages)


def make_cv_plan(cfg: RunConfig, frame: FeatureFrame, train_rows: np.ndarray) -> CvPlan:
    """Superset defaults: start at the 13th training month (so every sampled
    month has at least a year of history), end at the last training month."""
    train_months = frame.months[train_rows]
    if train_months.size < 13:
        raise DataError(f"only {train_months.size} training rows; need >= 13 for CV")
    start = cfg.cv_superset_start
    end = cfg.cv_superset_end
    if start is None:
        start = int(train_months[12])
    if end is None:
        end = int(train_months[-1])
    start = max(start, int(train_months[12]))
    end = min(end, int(train_months[-1]))
    return CvPlan(start, end, n=cfg.cv_n, k=cfg.cv_k, seed=cfg.seed, mode=cfg.cv_mode)


def _grid_for(cfg: RunConfig) -> dict[str, list]:
    grid = dict(cfg.grid) if cfg.grid else dict(DEFAULT_GRIDS[cfg.model])
    return grid


def _explanations_for(
    cfg: RunConfig, frame: FeatureFrame, handle, months: list[int]
) -> list[ShapExplanation]:
    cols = handle.columns
    names = tuple(frame.feature_names[int(j)] for j in cols)
    background = frame.X[:, cols]
    vf = ValueFunction(
        predict=handle.predict_selected,
        background=background,
        draws=cfg.explain_draws,
        seed=cfg.seed,
    )
    method = cfg.explain_method
    if method == "auto":
        method = "exact" if len(cols) <= min(EXACT_LIMIT, 12) else "kernel"
    out = []
    for m in months:
        row = frame.row_index(m)
        x = frame.X[row, cols]
        if method == "exact":
            e = exact_shapley(vf, x, feature_names=names, month=m)
        else:
            e = kernel_shap(
                vf, x, n_coalitions=cfg.explain_coalitions, seed=cfg.seed,
                feature_names=names, month=m,
            )
        out.append(e)
    return out


def _write_predictions(path, months, actual, model_pred, bench_pred):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "actual", "prediction", "benchmark_prediction"])
        for m, a, p, b in zip(months, actual, model_pred, bench_pred):
            writer.writerow([month_to_str(m), repr(a), repr(p), repr(b)])


def _metric_rows(cfg, months, actual, model_pred, bench_pred, crisis_ranges):
    """metrics.csv rows: per model x regime."""
    months = [int(m) for m in months]
    crisis_months = set()
    for a, b in crisis_ranges.get("crisis", []):
        crisis_months.update(range(a, b + 1))
    regimes = {}
    in_crisis = {m for m in months if m in crisis_months}
    if in_crisis:
        regimes = {"crisis": in_crisis, "normal": set(months) - in_crisis}
    else:
        regimes = {"normal": set(months)}

    model_sections = split_eval(model_pred, actual, months, regimes)
    bench_sections = split_eval(bench_pred, actual, months, regimes)
    err_model = np.asarray(model_pred) - np.asarray(actual)
    err_bench = np.asarray(bench_pred) - np.asarray(actual)

    rows = []
    for regime in sorted(model_sections):
        msec = model_sections[regime]
        bsec = bench_sections[regime]
        idx = [i for i, m in enumerate(months) if m in set(msec.months)]
        if len(idx) >= 8 and cfg.model != "ols":
            dm = dm_test(err_model[idx], err_bench[idx], h=cfg.dm_h)
            dm_stat, dm_p = dm.statistic, dm.p_value
        else:
            dm_stat, dm_p = float("nan"), float("nan")
        red = rmse_reduction(bsec.rmse, msec.rmse)
        rows.append(
            {
                "target": cfg.target,
                "horizon": cfg.horizon,
                "model": cfg.model,
                "regime": regime,
                "rmse": msec.rmse,
                "reduction_pct": red,
                "reduction_display": display_reduction(red),
                "dm_stat": dm_stat,
                "dm_p": dm_p,
            }
        )
        rows.append(
            {
                "target": cfg.target,
                "horizon": cfg.horizon,
                "model": "benchmark",
                "regime": regime,
                "rmse": bsec.rmse,
                "reduction_pct": 0.0,
                "reduction_display": 0,
                "dm_stat": float("nan"),
                "dm_p": float("nan"),
            }
        )
    return rows


def _write_metrics(path, rows):
    cols = ["target", "horizon", "model", "regime", "rmse", "reduction_pct",
            "reduction_display", "dm_stat", "dm_p"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row in rows:
            writer.writerow(
                [row[c] if isinstance(row[c], (str, int)) else repr(row[c]) for c in cols]
            )


def _write_manifest(path, cfg: RunConfig, extra: dict):
    lines = ["[config]"]
    lines += cfg.echo_lines()
    lines.append("")
    lines.append("[environment]")
    for key in sorted(extra):
        lines.append(f"{key} = {extra[key]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_pipeline(cfg: RunConfig, stages: tuple[str, ...] = ("cv", "test", "explain")) -> dict:
    """Execute the configured stages and write the output files.

    Returns a dict with paths, the fitted artifacts, and summary numbers.
    """
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    store, payments, crisis = prepare_store(cfg)
    frame = build_frame(cfg, store, payments)
    if len(frame) <= cfg.test_months + 13:
        raise DataError(
            f"frame has {len(frame)} rows; need > test_months + 13 = {cfg.test_months + 13}"
        )
    n_test = cfg.test_months
    train_rows = np.arange(len(frame) - n_test)
    test_months = [int(m) for m in frame.months[len(frame) - n_test :]]

    bench_names = tuple(n for n in frame.feature_names if n not in frame.payment_features)
    bench_frame = frame.select_columns(bench_names)
    model_frame = bench_frame if cfg.model == "ols" else frame

    result: dict = {"frame": frame, "output_dir": out_dir, "test_months": test_months}

    grid_result: GridResult | None = None
    best_params: dict = {}
    if "cv" in stages or "test" in stages or "explain" in stages:
        plan = make_cv_plan(cfg, model_frame, train_rows)
        grid = _grid_for(cfg)
        train_frame = model_frame.select_rows(train_rows)
        grid_result = grid_search_cv(
            lambda params: make_spec(cfg.model, params, seed=cfg.seed),
            grid,
            train_frame,
            plan,
        )
        grid_result.write_csv(out_dir / "gridsearch.csv")
        best_params = grid_result.best.params
        result["grid"] = grid_result
        result["best_params"] = best_params

    if "test" in stages or "explain" in stages:
        spec = make_spec(cfg.model, best_params, seed=cfg.seed)
        records = expanding_window_eval(spec, model_frame, test_months)
        bench_spec = make_spec("ols", {}, seed=cfg.seed)
        bench_records = expanding_window_eval(bench_spec, bench_frame, test_months)
        months = [r.month for r in records]
        actual = [r.actual for r in records]
        model_pred = [r.prediction for r in records]
        bench_pred = [r.prediction for r in bench_records]
        _write_predictions(out_dir / "predictions.csv", months, actual, model_pred, bench_pred)
        rows = _metric_rows(cfg, months, actual, model_pred, bench_pred, crisis)
        _write_metrics(out_dir / "metrics.csv", rows)
        result["metrics"] = rows
        result["test_rmse"] = rmse(model_pred, actual)
        result["bench_rmse"] = rmse(bench_pred, actual)

    if "explain" in stages and cfg.explain != "none":
        spec = make_spec(cfg.model, best_params, seed=cfg.seed)
        handle = spec.fit(model_frame)  # paper-style: explain the full-sample fit
        explain_months = (
            test_months if cfg.explain == "test" else [int(m) for m in model_frame.months]
        )
        explanations = _explanations_for(cfg, model_frame, handle, explain_months)
        write_shap_csv(explanations, out_dir / "shap_values.csv")
        write_importance_csv(explanations, out_dir / "importance.csv")
        result["explanations"] = explanations

    _write_manifest(
        out_dir / "run_manifest.txt",
        cfg,
        {
            "package_version": __version__,
            "numpy_version": np.__version__,
            "kernel_backend": _kernels.get_backend(),
            "crisis_ranges": ",".join(
                f"{month_to_str(a)}:{month_to_str(b)}" for a, b in crisis.get("crisis", [])
            ),
        },
    )
    result["manifest"] = out_dir / "run_manifest.txt"
    return result


def emit_report(run_dir) -> list[Path]:
    """Derive plot-ready files from a completed run directory:
    timeline.csv, force_<month>.csv per explained month, and
    dependence_<feature>.csv per explained feature."""
    run_dir = Path(run_dir)
    pred_path = run_dir / "predictions.csv"
    shap_path = run_dir / "shap_values.csv"
    if not pred_path.exists():
        raise DataError(f"{pred_path} missing: run the pipeline first")
    written = []

    with open(pred_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    timeline = run_dir / "timeline.csv"
    with open(timeline, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "actual", "predicted"])
        for row in rows:
            writer.writerow([row["month"], row["actual"], row["prediction"]])
    written.append(timeline)

    if not shap_path.exists():
        return written
    with open(shap_path, newline="", encoding="utf-8") as fh:
        shap_rows = list(csv.DictReader(fh))

    by_month: dict[str, list[dict]] = {}
    by_feature: dict[str, list[dict]] = {}
    for row in shap_rows:
        by_month.setdefault(row["month"], []).append(row)
        by_feature.setdefault(row["feature"], []).append(row)

    for month, rows in sorted(by_month.items()):
        path = run_dir / f"force_{month}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "phi", "feature_value", "prediction", "base_value"])
            for row in sorted(rows, key=lambda r: -abs(float(r["phi"]))):
                writer.writerow(
                    [row["feature"], row["phi"], row["feature_value"],
                     row["prediction"], row["base_value"]]
                )
        written.append(path)

    for feature, rows in sorted(by_feature.items()):
        vals = np.array([float(r["feature_value"]) for r in rows])
        sd = vals.std()
        mean = vals.mean()
        std_vals = (vals - mean) / sd if sd > 0 else vals * 0.0
        path = run_dir / f"dependence_{feature}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["month", "feature_value", "feature_value_std", "phi"])
            for row, sv in zip(rows, std_vals):
                writer.writerow([row["month"], row["feature_value"], repr(float(sv)), row["phi"]])
        written.append(path)
    return written


def write_truth_json(cfg: RunConfig, path) -> None:
    """Persist generator ground truth next to synthetic CSV exports."""
    economy = generate_economy(scenario_from_config(cfg))
    truth = economy.truth
    payload = {
        "asymmetry": truth.asymmetry,
        "support_stream": truth.support_stream,
        "asymmetric_stream": truth.asymmetric_stream,
        "loadings": truth.loadings,
        "crisis_months": {
            kind: [month_to_str(m) for m in ms] for kind, ms in truth.crisis_months.items()
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")

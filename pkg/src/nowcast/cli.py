"""Command-line interface.

Subcommands: synth, ingest, nowcast (alias: run), cv, explain, report.
Flags override config keys one-to-one.  Exit codes: 0 success, 2 config
error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import RunConfig
from .errors import ConfigError, DataError, NumericalError
from .pipeline import emit_report, prepare_store, run_pipeline, write_truth_json
from .vintages import parse_series_csv, write_series_csv


def _add_override_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="config file (key = value lines)")
    p.add_argument("--target", help="target series name")
    p.add_argument("--horizon", choices=("t", "t+1", "t+2"))
    p.add_argument("--model", help="ols|enet|svr|rfr|gbr|mlp|dfm")
    p.add_argument("--seed", type=int)
    p.add_argument("--vintages", choices=("latest", "realtime"))
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--data-mode", dest="data_mode", choices=("synth", "csv"))
    p.add_argument("--series-csv", dest="series_csv")
    p.add_argument("--ruleset")
    p.add_argument("--test-months", dest="test_months", type=int)
    p.add_argument("--cv-k", dest="cv_k", type=int)
    p.add_argument("--cv-n", dest="cv_n", type=int)
    p.add_argument("--cv-mode", dest="cv_mode", choices=("randomized", "standard-expanding"))
    p.add_argument("--explain", choices=("test", "all", "none"))


_OVERRIDE_KEYS = (
    "target", "horizon", "model", "seed", "vintages", "output_dir", "data_mode",
    "series_csv", "ruleset", "test_months", "cv_k", "cv_n", "cv_mode", "explain",
)


def _load_config(args) -> RunConfig:
    overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
    if args.config:
        return RunConfig.load(args.config, overrides)
    return RunConfig.from_mapping({}, overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nowcast",
        description="Nowcast macroeconomic growth rates from payment-stream series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic economy as a series CSV")
    _add_override_flags(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--truth-json", help="also write generator ground truth here")

    p = sub.add_parser("ingest", help="parse and validate a series CSV")
    p.add_argument("csv", help="input series CSV")
    p.add_argument("--out", help="write the normalized store back to this path")

    for name in ("nowcast", "run"):
        p = sub.add_parser(name, help="run the full pipeline" + (" (alias)" if name == "run" else ""))
        _add_override_flags(p)

    p = sub.add_parser("cv", help="run the cross-validated grid search only")
    _add_override_flags(p)

    p = sub.add_parser("explain", help="fit the final model and emit SHAP files")
    _add_override_flags(p)

    p = sub.add_parser("report", help="derive plot-ready files from a run directory")
    p.add_argument("run_dir", help="directory written by the nowcast subcommand")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            cfg = _load_config(args)
            store, _payments, _crisis = prepare_store(cfg)
            write_series_csv(store, args.out)
            print(f"wrote {args.out} ({len(store)} records)")
            if args.truth_json:
                write_truth_json(cfg, args.truth_json)
                print(f"wrote {args.truth_json}")
        elif args.command == "ingest":
            store = parse_series_csv(args.csv)
            names = store.series_names()
            print(f"{args.csv}: {len(store)} records, {len(names)} series")
            for name in names:
                months = store.ref_months(name)
                print(f"  {name}: {len(months)} months")
            if args.out:
                write_series_csv(store, args.out)
                print(f"wrote {args.out}")
        elif args.command in ("nowcast", "run"):
            cfg = _load_config(args)
            result = run_pipeline(cfg)
            out = Path(cfg.output_dir)
            print(f"run complete: {out}")
            if "test_rmse" in result:
                print(f"  model rmse     {result['test_rmse']:.4f}")
                print(f"  benchmark rmse {result['bench_rmse']:.4f}")
        elif args.command == "cv":
            cfg = _load_config(args)
            result = run_pipeline(cfg, stages=("cv",))
            best = result["grid"].best
            print(f"gridsearch.csv written to {cfg.output_dir}")
            print(f"  best params: {best.params} (mean rmse {best.mean_rmse:.4f})")
        elif args.command == "explain":
            cfg = _load_config(args)
            if cfg.explain == "none":
                raise ConfigError("explain subcommand requires explain != none")
            run_pipeline(cfg, stages=("cv", "explain"))
            print(f"shap_values.csv and importance.csv written to {cfg.output_dir}")
        elif args.command == "report":
            written = emit_report(args.run_dir)
            for path in written:
                print(f"wrote {path}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

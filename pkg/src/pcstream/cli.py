"""Command-line entry point: fit, run, matrix, inspect and synth."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .clpc import fit_pattern
from .errors import PcstreamError
from .harness import serialize
from .harness.config import build_config
from .harness.data import StreamSpec, ingest_csv
from .harness.experiment import prepare, run_matrix
from .harness.session import run_session
from .harness.synthetic import DriftSpec, SyntheticSpec, generate, write_csv

log = logging.getLogger("pcstream")


def _data_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="input CSV with a header row")
    p.add_argument("--time-col", default="time")
    p.add_argument("--label-col", default="label")
    p.add_argument("--features", help="comma-separated feature columns (default: all others)")
    p.add_argument("--config", help="flat YAML/JSON configuration file")
    p.add_argument("--rate", help="sampling rate: N, fixed:N or random:MIN:MAX")
    p.add_argument("--seed", type=int)
    p.add_argument("--split", type=float, dest="split_fraction", help="training share of the stream")
    p.add_argument("--standardize", action="store_true", default=None, help="z-score features with training statistics")


def _query_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", choices=["linear", "exponential", "periodic"])
    p.add_argument("--threshold", type=float)
    p.add_argument("--budget", type=int, help="queries allowed per budget window")
    p.add_argument("--budget-window", type=int)
    p.add_argument("--history-length", type=int, help="matching window length")
    p.add_argument("--alpha", type=float, help="online learning rate")
    p.add_argument("--no-learning", action="store_false", dest="learning_enabled", default=None)


_OVERRIDE_KEYS = (
    "rate",
    "seed",
    "split_fraction",
    "standardize",
    "strategy",
    "threshold",
    "budget",
    "budget_window",
    "history_length",
    "alpha",
    "learning_enabled",
    "repetitions",
)


def _config(args):
    overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
    return build_config(args.config, overrides)


def _stream(args):
    feats = tuple(f.strip() for f in args.features.split(",")) if args.features else None
    return ingest_csv(StreamSpec(Path(args.data), feats, args.time_col, args.label_col))


def cmd_fit(args) -> int:
    cfg = _config(args)
    stream = _stream(args)
    train, _ = prepare(stream, cfg)
    pattern = fit_pattern(train, cfg.fit)
    serialize.save_pattern(args.out, pattern, stream.class_names, stream.feature_names)
    log.info("wrote %s (%d curves, %d points)", args.out, len(pattern.curves), sum(c.K for c in pattern.curves))
    return 0


def cmd_run(args) -> int:
    cfg = _config(args)
    stream = _stream(args)
    train, test = prepare(stream, cfg)
    pattern = serialize.load_pattern(args.pattern)[0] if args.pattern else None
    result = run_session(train, test, cfg, n_classes=stream.n_classes, pattern=pattern)
    doc = serialize.report_document(result, cfg, stream.class_names, data=str(args.data), include_runtime=args.timing)
    text = serialize.dump_report(doc)
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.summary:
        serialize.write_csv(args.summary, [serialize.summary_row(result, cfg, str(args.data))], serialize.SUMMARY_FIELDS)
    if args.save_pattern:
        serialize.save_pattern(args.save_pattern, result.final_pattern, stream.class_names, stream.feature_names)
    r = result.report
    log.info("accuracy %.4f  f %.4f  g %.4f  queries %d", r.accuracy, r.f_score, r.g_score, r.total_queries)
    return 0


def cmd_matrix(args) -> int:
    cfg = _config(args)
    stream = _stream(args)
    cells = run_matrix(
        stream,
        cfg,
        rates=args.rates.split(","),
        strategies=args.strategies.split(","),
        budgets=args.budgets.split(","),
        repetitions=args.repetitions,
        jobs=args.jobs,
    )
    rows = [c.row() for c in cells]
    fields = list(rows[0]) if rows else []
    out = Path(args.out)
    serialize.write_csv(out.with_suffix(".csv"), rows, fields)
    doc = {"data": str(args.data), "config": cfg.to_flat(), "cells": [dict(c.row(), reps=c.reps) for c in cells]}
    out.with_suffix(".json").write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    failed = [c for c in cells if c.error]
    for c in failed:
        log.error("cell %s %s %s/%s: %s", c.rate, c.strategy, c.budget, c.budget_window, c.error)
    return 1 if failed else 0


def cmd_inspect(args) -> int:
    pattern, doc = serialize.load_pattern(args.pattern)
    rows = serialize.pattern_geometry_rows(pattern, doc.get("class_names"), doc.get("feature_names"))
    fields = list(rows[0]) if rows else ["class_id", "class_name", "point_index", "t"]
    if args.out:
        serialize.write_csv(args.out, rows, fields)
    else:
        serialize.write_rows(sys.stdout, rows, fields)
    return 0


def cmd_synth(args) -> int:
    drift = DriftSpec(args.drift_start, args.drift_length, tuple(args.drift_magnitude)) if args.drift else None
    spec = SyntheticSpec(n_points=args.n, run_length=args.run_length, dt=args.dt, noise_fraction=args.noise, drift=drift, seed=args.seed)
    t, X, labels = generate(spec)
    write_csv(args.out, t, X, labels)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcstream", description="Principal-curve stream classification.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a governing pattern on the training split and save it")
    _data_options(p)
    p.add_argument("--out", required=True, help="pattern JSON path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("run", help="run one streaming session and emit a JSON report")
    _data_options(p)
    _query_options(p)
    p.add_argument("--pattern", help="use a saved pattern instead of fitting")
    p.add_argument("--report", help="JSON report path (default: stdout)")
    p.add_argument("--summary", help="CSV summary path")
    p.add_argument("--save-pattern", help="write the pattern after online learning")
    p.add_argument("--timing", action="store_true", help="include wall-clock runtime in the JSON report")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("matrix", help="run a rate x strategy x budget grid")
    _data_options(p)
    _query_options(p)
    p.add_argument("--rates", default="1", help="comma-separated rates, e.g. 1,10,random:1:10")
    p.add_argument("--strategies", default="linear,exponential")
    p.add_argument("--budgets", default="30/100", help="comma-separated B/W pairs")
    p.add_argument("--repetitions", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output stem; writes STEM.csv and STEM.json")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("inspect", help="dump pattern geometry as CSV")
    p.add_argument("pattern")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("synth", help="write a synthetic labelled stream")
    p.add_argument("--out", required=True)
    p.add_argument("-n", type=int, default=3000)
    p.add_argument("--run-length", type=int, default=100)
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--drift", action="store_true", help="inject a feature drift segment")
    p.add_argument("--drift-start", type=float, default=0.75)
    p.add_argument("--drift-length", type=float, default=0.1)
    p.add_argument("--drift-magnitude", type=float, nargs="+", default=[2.0, 0.0])
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (PcstreamError, OSError) as exc:
        print(f"pcstream: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

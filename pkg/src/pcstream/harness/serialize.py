"""On-disk formats: pattern JSON, session report JSON, CSV summaries."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from ..errors import ParseError
from ..model import GoverningPattern, PrincipalCurve
from .config import RunConfig
from .session import SessionResult

PATTERN_FORMAT = "pcstream.governing_pattern"
PATTERN_VERSION = 1
REPORT_FORMAT = "pcstream.session_report"
REPORT_VERSION = 1

SUMMARY_FIELDS = (
    "data",
    "rate",
    "strategy",
    "threshold",
    "budget",
    "n_train",
    "n_test",
    "accuracy",
    "f_score",
    "g_score",
    "apt_queries",
    "inapt_queries",
    "apt_ratio",
    "max_queries_per_window",
    "runtime_seconds",
)


def pattern_to_dict(
    pattern: GoverningPattern,
    class_names: Optional[Sequence[str]] = None,
    feature_names: Optional[Sequence[str]] = None,
) -> dict:
    return {
        "format": PATTERN_FORMAT,
        "version": PATTERN_VERSION,
        "d": pattern.d,
        "feature_names": list(feature_names) if feature_names else None,
        "class_names": list(class_names) if class_names else None,
        "t_start": pattern.t_start,
        "t_end": pattern.t_end,
        "curves": [
            {"class_id": c.class_id, "points": c.vertices.tolist()}
            for c in pattern.curves
        ],
    }


def pattern_from_dict(doc: dict) -> GoverningPattern:
    if doc.get("format") != PATTERN_FORMAT:
        raise ParseError(f"not a governing pattern document (format={doc.get('format')!r})")
    if doc.get("version") != PATTERN_VERSION:
        raise ParseError(f"unsupported pattern version {doc.get('version')!r}")
    return GoverningPattern(PrincipalCurve(c["points"], c["class_id"]) for c in doc["curves"])


def save_pattern(path, pattern: GoverningPattern, class_names=None, feature_names=None) -> None:
    Path(path).write_text(json.dumps(pattern_to_dict(pattern, class_names, feature_names), indent=1) + "\n")


def load_pattern(path):
    """Return ``(pattern, document)``."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    return pattern_from_dict(doc), doc


def pattern_geometry_rows(pattern: GoverningPattern, class_names=None, feature_names=None) -> List[dict]:
    """One row per curve vertex, ready for external plotting."""
    feats = list(feature_names) if feature_names else [f"x{j + 1}" for j in range(pattern.d)]
    rows = []
    for c in pattern.curves:
        name = class_names[c.class_id] if class_names and c.class_id < len(class_names) else str(c.class_id)
        for k, v in enumerate(c.vertices):
            row = {"class_id": c.class_id, "class_name": name, "point_index": k, "t": float(v[0])}
            row.update({f: float(val) for f, val in zip(feats, v[1:])})
            rows.append(row)
    return rows


def write_rows(fh, rows: Iterable[dict], fieldnames: Sequence[str]) -> None:
    w = csv.DictWriter(fh, fieldnames=list(fieldnames), extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if v is None else v) for k, v in row.items()})


def write_csv(path, rows: Iterable[dict], fieldnames: Sequence[str]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        write_rows(fh, rows, fieldnames)


def report_document(
    result: SessionResult,
    cfg: RunConfig,
    class_names: Sequence[str],
    data: Optional[str] = None,
    include_runtime: bool = False,
) -> dict:
    """JSON-ready session report; wall-clock time only on request so reruns are byte-identical."""
    doc = {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "data": data,
        "config": cfg.to_flat(),
        "class_mapping": {name: i for i, name in enumerate(class_names)},
        "absent_from_training": list(result.absent_classes),
        "n_train": result.n_train,
        "n_test": result.n_test,
        "curve_points": {str(c.class_id): c.K for c in result.initial_pattern.curves},
        "metrics": result.report.to_dict(),
        "max_queries_per_window": result.max_queries_per_window,
        "query_log_fields": ["index", "predicted", "score", "queried", "apt"],
        "query_log": [e.to_list() for e in result.query_log],
    }
    if include_runtime:
        doc["runtime_seconds"] = result.runtime_seconds
    return doc


def dump_report(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def summary_row(result: SessionResult, cfg: RunConfig, data: Optional[str] = None) -> dict:
    r = result.report
    return {
        "data": data or "",
        "rate": str(cfg.rate),
        "strategy": cfg.query.strategy.value,
        "threshold": cfg.query.threshold,
        "budget": f"{cfg.budget}/{cfg.budget_window}",
        "n_train": result.n_train,
        "n_test": result.n_test,
        "accuracy": r.accuracy,
        "f_score": r.f_score,
        "g_score": r.g_score,
        "apt_queries": r.apt_queries,
        "inapt_queries": r.inapt_queries,
        "apt_ratio": r.apt_ratio,
        "max_queries_per_window": result.max_queries_per_window,
        "runtime_seconds": result.runtime_seconds,
    }

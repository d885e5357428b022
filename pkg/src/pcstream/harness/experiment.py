"""Stream preparation and the rate x strategy x budget experiment grid."""
from __future__ import annotations

import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import ConfigError
from .config import RunConfig
from .data import RandomUniform, Stream, parse_rate, resample, split_chronological, standardize
from .session import SessionResult, run_session

log = logging.getLogger(__name__)

AGGREGATED = ("accuracy", "f_score", "g_score", "apt_queries", "inapt_queries", "apt_ratio")


def prepare(stream: Stream, cfg: RunConfig, repetition: int = 0):
    """Resample, split and (optionally) standardize; returns ``(train, test)``."""
    seed = cfg.seed + repetition
    samples = resample(stream.samples, cfg.rate, seed=seed)
    train, test = split_chronological(samples, cfg.split_fraction)
    if cfg.standardize:
        train, test = standardize(train, test)
    return train, test


def run_stream(stream: Stream, cfg: RunConfig, repetition: int = 0) -> SessionResult:
    train, test = prepare(stream, cfg, repetition)
    return run_session(train, test, cfg, n_classes=stream.n_classes)


def parse_budget(text) -> Tuple[int, int]:
    """``"30/100"`` -> ``(30, 100)``."""
    if isinstance(text, tuple):
        return text
    b, _, w = str(text).partition("/")
    try:
        return int(b), int(w or 100)
    except ValueError:
        raise ConfigError(f"budget must look like B/W, got {text!r}") from None


def session_metrics(result: SessionResult) -> Dict[str, Optional[float]]:
    r = result.report
    return {
        "accuracy": r.accuracy,
        "f_score": r.f_score,
        "g_score": r.g_score,
        "apt_queries": r.apt_queries,
        "inapt_queries": r.inapt_queries,
        "apt_ratio": r.apt_ratio,
        "max_queries_per_window": result.max_queries_per_window,
        "runtime_seconds": result.runtime_seconds,
    }


@dataclass
class Cell:
    rate: str
    strategy: str
    budget: int
    budget_window: int
    reps: List[Dict[str, Optional[float]]] = field(default_factory=list)
    error: Optional[str] = None

    def aggregate(self) -> Dict[str, Optional[float]]:
        out: Dict[str, Optional[float]] = {}
        for key in AGGREGATED:
            values = [r[key] for r in self.reps if r.get(key) is not None]
            # statistics.* work in exact rational arithmetic: identical reps give variance 0.0 exactly
            out[f"{key}_mean"] = statistics.mean(values) if values else None
            out[f"{key}_var"] = statistics.pvariance(values) if values else None
        runtimes = [r["runtime_seconds"] for r in self.reps]
        out["runtime_seconds_mean"] = statistics.fmean(runtimes) if runtimes else None
        out["max_queries_per_window"] = max((r["max_queries_per_window"] for r in self.reps), default=None)
        return out

    def row(self) -> Dict[str, object]:
        base = {
            "rate": self.rate,
            "strategy": self.strategy,
            "budget": f"{self.budget}/{self.budget_window}",
            "repetitions": len(self.reps),
        }
        base.update(self.aggregate())
        base["error"] = self.error or ""
        return base


def _cell_config(base: RunConfig, rate, strategy, budget) -> RunConfig:
    b, w = parse_budget(budget)
    return base.with_overrides({"rate": str(parse_rate(rate)), "strategy": strategy, "budget": b, "budget_window": w})


def _run_rep(args):
    stream, cfg, rep = args
    try:
        return session_metrics(run_stream(stream, cfg, rep)), None
    except Exception as exc:  # isolate the failing cell, keep the grid going
        return None, f"{type(exc).__name__}: {exc}"


def run_matrix(
    stream: Stream,
    base: RunConfig,
    rates: Sequence = ("1",),
    strategies: Sequence[str] = ("linear",),
    budgets: Sequence = ("30/100",),
    repetitions: Optional[int] = None,
    jobs: int = 1,
) -> List[Cell]:
    """Run every (rate, strategy, budget) cell ``repetitions`` times.

    Fixed-rate cells are deterministic, so their repetitions agree exactly;
    random-rate cells use seed ``base.seed + repetition``.
    """
    reps = repetitions or base.repetitions
    cells, tasks = [], []
    for rate, strategy, budget in product(rates, strategies, budgets):
        try:
            b, w = parse_budget(budget)
            cell = Cell(str(parse_rate(rate)), str(strategy), b, w)
            cfg = _cell_config(base, rate, strategy, budget)
        except Exception as exc:
            cell = Cell(str(rate), str(strategy), 0, 0, error=f"{type(exc).__name__}: {exc}")
            cells.append(cell)
            continue
        cells.append(cell)
        tasks.extend((cell, (stream, cfg, r)) for r in range(reps))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_rep, [t[1] for t in tasks]))
    else:
        outcomes = [_run_rep(t[1]) for t in tasks]

    for (cell, _), (metrics, error) in zip(tasks, outcomes):
        if error is not None:
            log.error("cell %s/%s/%s failed: %s", cell.rate, cell.strategy, cell.budget, error)
            cell.error = cell.error or error
        else:
            cell.reps.append(metrics)
    return cells

"""Replay of a test stream through prediction, query decisions and learning."""
from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from ..classifier import online_update, predict_label
from ..clpc import fit_pattern
from ..matching import Window
from ..metrics import ConfusionCounts, MetricsReport, record_query
from ..model import GoverningPattern, TimedSample
from ..sampling import BudgetState, SimilarityHistory, decide_query
from .config import RunConfig

log = logging.getLogger(__name__)


@dataclass
class QueryLogEntry:
    index: int
    predicted: int
    score: float
    queried: bool
    apt: Optional[bool] = None  # only known for granted queries

    def to_list(self):
        return [self.index, self.predicted, self.score, int(self.queried), self.apt]


@dataclass
class SessionResult:
    report: MetricsReport
    predictions: List[int]
    query_log: List[QueryLogEntry]
    initial_pattern: GoverningPattern
    final_pattern: GoverningPattern
    max_queries_per_window: int
    n_train: int
    n_test: int
    runtime_seconds: float = 0.0
    absent_classes: tuple = ()

    @property
    def queried_indices(self) -> List[int]:
        return [e.index for e in self.query_log if e.queried]


def run_session(
    train: Sequence[TimedSample],
    test: Sequence[TimedSample],
    cfg: RunConfig = RunConfig(),
    n_classes: Optional[int] = None,
    pattern: Optional[GoverningPattern] = None,
) -> SessionResult:
    """Fit on ``train`` (unless a pattern is given) and replay ``test`` in order.

    Test labels are read only for granted queries and for the final scoring.
    The window is pre-filled with the tail of ``train`` when the two streams
    are contiguous in time.
    """
    started = time.perf_counter()
    if pattern is None:
        pattern = fit_pattern(train, cfg.fit)
    initial = pattern

    H = cfg.history_length
    window: deque = deque(maxlen=H)
    if train and test and train[-1].t < test[0].t:
        for s in train[-(H - 1):] if H > 1 else []:
            window.append(TimedSample(s.t, s.x))

    history = SimilarityHistory(cfg.query.history_capacity)
    budget = BudgetState(window_size=cfg.budget_window, budget=cfg.budget)
    report = MetricsReport(ConfusionCounts.empty(max(n_classes or 0, 1)))
    predictions: List[int] = []
    qlog: List[QueryLogEntry] = []
    in_window, max_in_window = 0, 0

    for i, sample in enumerate(test):
        window.append(TimedSample(sample.t, sample.x))
        outcome = predict_label(Window(list(window)), pattern, cfg.match)
        predictions.append(outcome.predicted_class)
        history.push(-outcome.match.score)

        if budget.position_in_window == 0:
            in_window = 0
        decision, budget = decide_query(history, cfg.query, budget)
        entry = QueryLogEntry(i, outcome.predicted_class, outcome.match.score, bool(decision))
        if decision:
            truth = int(sample.label)
            report = record_query(report, outcome.predicted_class, truth)
            entry.apt = outcome.predicted_class != truth
            in_window += 1
            max_in_window = max(max_in_window, in_window)
            if cfg.learning.enabled:
                pattern = online_update(pattern, outcome, truth, cfg.learning)
        qlog.append(entry)

    # final scoring: the only place test labels are read outside granted queries
    truth = [int(s.label) for s in test]
    if n_classes is None:
        n_classes = max(truth + [int(s.label) for s in train] + [-1]) + 1
    absent = tuple(sorted(set(truth) - set(initial.class_ids)))
    if absent:
        log.warning("classes %s occur in the test stream but not in training; they are never predicted", absent)
    counts = ConfusionCounts.from_labels(truth, predictions, n_classes)
    return SessionResult(
        report=report.with_counts(counts),
        predictions=predictions,
        query_log=qlog,
        initial_pattern=initial,
        final_pattern=pattern,
        max_queries_per_window=max_in_window,
        n_train=len(train),
        n_test=len(test),
        runtime_seconds=time.perf_counter() - started,
        absent_classes=absent,
    )

"""Confusion accounting, macro F/G scores and query-quality tallies."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts:
    """One-vs-rest counts per class, derived from a truth x prediction matrix."""

    matrix: np.ndarray  # rows: true class, columns: predicted class

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.int64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("confusion matrix must be square")
        if np.any(m < 0):
            raise ValueError("confusion counts must be non-negative")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def empty(cls, n_classes: int) -> "ConfusionCounts":
        return cls(np.zeros((n_classes, n_classes), dtype=np.int64))

    @classmethod
    def from_labels(cls, truth: Sequence[int], predicted: Sequence[int], n_classes: int) -> "ConfusionCounts":
        m = np.zeros((n_classes, n_classes), dtype=np.int64)
        np.add.at(m, (np.asarray(truth, dtype=int), np.asarray(predicted, dtype=int)), 1)
        return cls(m)

    @property
    def n_classes(self) -> int:
        return self.matrix.shape[0]

    @property
    def total(self) -> int:
        return int(self.matrix.sum())

    @property
    def tp(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    @property
    def fp(self) -> np.ndarray:
        return self.matrix.sum(axis=0) - self.tp

    @property
    def fn(self) -> np.ndarray:
        return self.matrix.sum(axis=1) - self.tp

    @property
    def tn(self) -> np.ndarray:
        return self.total - self.tp - self.fp - self.fn

    def merge(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.matrix + other.matrix)


class ClassScores(NamedTuple):
    per_class: Dict[int, float]
    macro: float
    zero_denominator: Tuple[int, ...]


def _weights(n: int, class_weights) -> np.ndarray:
    return np.ones(n) if class_weights is None else np.asarray(class_weights, dtype=float)


def _score(num, den, n, class_weights) -> ClassScores:
    per = np.where(den > 0, num / np.where(den > 0, den, 1), 0.0)
    flagged = tuple(int(i) for i in np.nonzero(den == 0)[0])
    macro = float((_weights(n, class_weights) * per).sum() / n) if n else 0.0
    return ClassScores({i: float(per[i]) for i in range(n)}, macro, flagged)


def f_score(counts: ConfusionCounts, beta: float = 1.0, class_weights=None) -> ClassScores:
    """``(1+b^2) TP / ((1+b^2) TP + FP + b^2 FN)`` per class, macro averaged.

    Classes with a zero denominator score 0 and are listed in
    ``zero_denominator``; they still count towards the macro mean.
    """
    if not beta > 0:
        raise ValueError("beta must be > 0")
    b2 = beta * beta
    tp, fp, fn = counts.tp.astype(float), counts.fp.astype(float), counts.fn.astype(float)
    return _score((1 + b2) * tp, (1 + b2) * tp + fp + b2 * fn, counts.n_classes, class_weights)


def g_score(counts: ConfusionCounts, beta: float = 1.0, class_weights=None) -> ClassScores:
    """Jaccard-style ``TP / (TP + FP + b FN)`` per class, macro averaged."""
    if not beta > 0:
        raise ValueError("beta must be > 0")
    tp, fp, fn = counts.tp.astype(float), counts.fp.astype(float), counts.fn.astype(float)
    return _score(tp, tp + fp + beta * fn, counts.n_classes, class_weights)


@dataclass(frozen=True)
class MetricsReport:
    counts: ConfusionCounts
    apt_queries: int = 0
    inapt_queries: int = 0
    beta: float = 1.0
    class_weights: Optional[Tuple[float, ...]] = None

    @property
    def accuracy(self) -> float:
        total = self.counts.total
        return float(self.counts.tp.sum() / total) if total else 0.0

    @property
    def f(self) -> ClassScores:
        return f_score(self.counts, self.beta, self.class_weights)

    @property
    def g(self) -> ClassScores:
        return g_score(self.counts, self.beta, self.class_weights)

    @property
    def f_score(self) -> float:
        return self.f.macro

    @property
    def g_score(self) -> float:
        return self.g.macro

    @property
    def total_queries(self) -> int:
        return self.apt_queries + self.inapt_queries

    @property
    def apt_ratio(self) -> Optional[float]:
        """Share of queries spent on mispredicted samples; ``None`` without queries."""
        n = self.total_queries
        return self.apt_queries / n if n else None

    def with_counts(self, counts: ConfusionCounts) -> "MetricsReport":
        return replace(self, counts=counts)

    def merge(self, other: "MetricsReport") -> "MetricsReport":
        return replace(
            self,
            counts=self.counts.merge(other.counts),
            apt_queries=self.apt_queries + other.apt_queries,
            inapt_queries=self.inapt_queries + other.inapt_queries,
        )

    def to_dict(self) -> dict:
        f, g = self.f, self.g
        c = self.counts
        per_class = [
            {
                "class_id": i,
                "tp": int(c.tp[i]),
                "fp": int(c.fp[i]),
                "fn": int(c.fn[i]),
                "tn": int(c.tn[i]),
                "f_score": f.per_class[i],
                "g_score": g.per_class[i],
                "zero_denominator": i in f.zero_denominator,
            }
            for i in range(c.n_classes)
        ]
        return {
            "total": c.total,
            "accuracy": self.accuracy,
            "f_score": f.macro,
            "g_score": g.macro,
            "beta": self.beta,
            "per_class": per_class,
            "confusion_matrix": c.matrix.tolist(),
            "apt_queries": self.apt_queries,
            "inapt_queries": self.inapt_queries,
            "apt_ratio": self.apt_ratio,
        }


def record_query(report: MetricsReport, predicted: int, truth: int) -> MetricsReport:
    """Count a granted query as apt (prediction was wrong) or inapt."""
    if predicted != truth:
        return replace(report, apt_queries=report.apt_queries + 1)
    return replace(report, inapt_queries=report.inapt_queries + 1)

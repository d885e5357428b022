"""Deterministic label-query decisions driven by the similarity history.

Histories hold *similarity* values (higher = the stream fits the pattern
better).  Match scores are lower-is-better, so sessions push ``-score``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

from .errors import ConfigError


class Strategy(str, Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exponential"
    # uniform-in-time baseline; not driven by the history
    PERIODIC = "periodic"


DEFAULT_THRESHOLDS = {Strategy.LINEAR: 0.6, Strategy.EXPONENTIAL: 0.5, Strategy.PERIODIC: 0.0}


class SimilarityHistory:
    """Ring buffer of the most recent ``capacity`` similarity values."""

    def __init__(self, capacity: int = 10, values: Iterable[float] = ()):
        if capacity < 2:
            raise ConfigError("history capacity must be >= 2")
        self.capacity = capacity
        self._values = deque(values, maxlen=capacity)

    def push(self, value: float) -> None:
        self._values.append(float(value))

    @property
    def values(self) -> tuple:
        return tuple(self._values)

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        return f"SimilarityHistory(capacity={self.capacity}, values={list(self._values)})"


@dataclass(frozen=True)
class QueryConfig:
    strategy: Strategy = Strategy.LINEAR
    threshold: Optional[float] = None
    history_capacity: int = 10

    def __post_init__(self):
        try:
            object.__setattr__(self, "strategy", Strategy(self.strategy))
        except ValueError:
            raise ConfigError(f"unknown query strategy {self.strategy!r}") from None
        if self.threshold is None:
            object.__setattr__(self, "threshold", DEFAULT_THRESHOLDS[self.strategy])
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold must lie in [0, 1]")
        if self.history_capacity < 2:
            raise ConfigError("history_capacity must be >= 2")


@dataclass(frozen=True)
class BudgetState:
    """Tumbling-window query budget: at most ``budget`` queries per ``window_size`` samples."""

    window_size: int = 100
    budget: int = 30
    used_in_window: int = 0
    position_in_window: int = 0

    def __post_init__(self):
        if self.window_size < 1 or self.budget < 0:
            raise ConfigError("window_size must be >= 1 and budget >= 0")
        if not 0 <= self.used_in_window <= self.budget:
            raise ConfigError("used_in_window out of range")
        if not 0 <= self.position_in_window < self.window_size:
            raise ConfigError("position_in_window out of range")

    @property
    def exhausted(self) -> bool:
        return self.used_in_window >= self.budget


def _values(history) -> Sequence[float]:
    return history.values if isinstance(history, SimilarityHistory) else tuple(history)


def linear_query(history, threshold: float) -> int:
    """Query when the share of decreases (counting from 1) reaches the threshold."""
    v = _values(history)
    if len(v) < 2:
        return 0
    q = 1
    for i in range(1, len(v)):
        if v[i] < v[i - 1]:
            q += 1
    return int(q / len(v) >= threshold)


def exponential_score(history) -> float:
    """Normalized penalty ``q / 2**(L-1)``; the coefficient doubles after each
    decrease and halves otherwise, and multiplies ``q`` before being updated."""
    v = _values(history)
    c = 1.0
    q = 1.0
    for i in range(1, len(v)):
        q *= c
        if v[i] < v[i - 1]:
            c *= 2.0
        else:
            c /= 2.0
    return q / 2.0 ** (len(v) - 1)


def exponential_query(history, threshold: float) -> int:
    v = _values(history)
    if len(v) < 2:
        return 0
    return int(exponential_score(v) >= threshold)


def periodic_query(budget: BudgetState) -> int:
    """Spread the window's budget evenly over its positions."""
    p, w, b = budget.position_in_window, budget.window_size, budget.budget
    return int((p + 1) * b // w > p * b // w)


def strategy_decision(history, cfg: QueryConfig, budget: BudgetState) -> int:
    if cfg.strategy is Strategy.LINEAR:
        return linear_query(history, cfg.threshold)
    if cfg.strategy is Strategy.EXPONENTIAL:
        return exponential_query(history, cfg.threshold)
    return periodic_query(budget)


def advance(budget: BudgetState, queried: bool) -> BudgetState:
    used = budget.used_in_window + int(queried)
    pos = budget.position_in_window + 1
    if pos == budget.window_size:
        return replace(budget, used_in_window=0, position_in_window=0)
    return replace(budget, used_in_window=used, position_in_window=pos)


def decide_query(history, cfg: QueryConfig, budget: BudgetState) -> Tuple[int, BudgetState]:
    """Strategy decision gated by the remaining budget of the current window."""
    decision = int(strategy_decision(history, cfg, budget) and not budget.exhausted)
    return decision, advance(budget, bool(decision))

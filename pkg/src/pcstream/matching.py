"""Rigid time-shift matching of the recent input window against the pattern.

Scores follow a KL-style objective where lower means more similar::

    score(t_o) = sum_i |F_i| * log(max(|F_i - X_i|, eps) / max(|F_i|, eps))

with ``X_i = (t_i + t_o, x_i)`` the shifted window samples and ``F_i`` their
projection onto the nearest curve.  The distance ``|F_i - X_i|`` is always
taken in joint (time, feature) space.  The weight ``|F_i|`` uses the feature
coordinates only unless ``MatchConfig.norm_includes_time`` is set; including
time makes the weight grow with ``t_o`` and drags matches towards the end of
the pattern.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatch,
    EmptyPattern,
    EmptyWindow,
    NonMonotoneTime,
    OffsetOutOfRange,
)
from .model import GoverningPattern, TimedSample, project_nearest_batch, stack_samples

EPS = 1e-12
DEFAULT_GRID_DIVISIONS = 500
_CHUNK_POINTS = 8192


class Window:
    """The last ``H`` samples of a stream, optionally normalized to start at 0."""

    __slots__ = ("samples", "normalized", "_array")

    def __init__(self, samples: Sequence[TimedSample], normalized: bool = False):
        samples = tuple(samples)
        if not samples:
            raise EmptyWindow("window holds no samples")
        arr = stack_samples(samples)
        if np.any(np.diff(arr[:, 0]) <= 0):
            raise NonMonotoneTime("window times must strictly increase")
        if normalized and arr[0, 0] != 0.0:
            raise ValueError("a normalized window must start at t=0")
        arr.setflags(write=False)
        self.samples = samples
        self.normalized = normalized
        self._array = arr

    @classmethod
    def from_array(cls, arr, labels=None, normalized: bool = False) -> "Window":
        arr = np.asarray(arr, dtype=float)
        labels = labels if labels is not None else [None] * len(arr)
        return cls([TimedSample(row[0], row[1:], lab) for row, lab in zip(arr, labels)], normalized)

    @property
    def array(self) -> np.ndarray:
        return self._array

    @property
    def H(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return float(self._array[-1, 0] - self._array[0, 0])

    def __len__(self):
        return self.H


@dataclass(frozen=True)
class MatchConfig:
    """Search settings; ``None`` picks a default derived from the inputs.

    ``grid_step`` defaults to ``t_end / 500`` and ``refine_halfwidth`` to the
    window duration.
    """

    potential_rel_threshold: float = 0.2
    grid_step: Optional[float] = None
    refine_halfwidth: Optional[float] = None
    prune_enabled: bool = True
    norm_includes_time: bool = False

    def __post_init__(self):
        if not self.potential_rel_threshold > 0:
            raise ConfigError("potential_rel_threshold must be > 0")
        if self.grid_step is not None and not self.grid_step > 0:
            raise ConfigError("grid_step must be > 0")
        if self.refine_halfwidth is not None and self.refine_halfwidth < 0:
            raise ConfigError("refine_halfwidth must be >= 0")

    def step_for(self, pattern: GoverningPattern) -> float:
        return self.grid_step if self.grid_step is not None else pattern.t_end / DEFAULT_GRID_DIVISIONS


@dataclass(frozen=True)
class MatchResult:
    t_offset: float
    score: float
    candidates_evaluated: int


def normalize_window(w: Window) -> Window:
    """Shift window times so the oldest sample sits at t=0."""
    if w.H == 0:
        raise EmptyWindow("window holds no samples")
    if w.normalized:
        return w
    t0 = w.samples[0].t
    return Window([TimedSample(s.t - t0, s.x, s.label) for s in w.samples], normalized=True)


def _normalized_array(w: Window) -> np.ndarray:
    if w.normalized:
        return w.array
    arr = w.array.copy()
    arr[:, 0] -= arr[0, 0]
    return arr


def score_offsets(
    window_arr: np.ndarray,
    pattern: GoverningPattern,
    offsets,
    norm_includes_time: bool = False,
) -> np.ndarray:
    """Similarity score of a normalized window array at each offset."""
    offsets = np.asarray(offsets, dtype=float).reshape(-1)
    H, D = window_arr.shape
    if D != pattern.d + 1:
        raise DimensionMismatch(f"window has {D - 1} features, pattern has {pattern.d}")
    m = offsets.shape[0]
    shifted = np.repeat(window_arr[None], m, axis=0)
    shifted[:, :, 0] += offsets[:, None]
    flat = shifted.reshape(m * H, D)
    foot = np.empty_like(flat)
    dist = np.empty(m * H)
    for start in range(0, m * H, _CHUNK_POINTS):
        stop = min(start + _CHUNK_POINTS, m * H)
        proj = project_nearest_batch(flat[start:stop], pattern)
        foot[start:stop] = proj.foot
        dist[start:stop] = proj.distance
    weight = foot if norm_includes_time else foot[:, 1:]
    norm_f = np.sqrt((weight * weight).sum(axis=1))
    terms = norm_f * np.log(np.maximum(dist, EPS) / np.maximum(norm_f, EPS))
    return terms.reshape(m, H).sum(axis=1)


def similarity_score(w: Window, pattern: GoverningPattern, t_o: float, cfg: Optional[MatchConfig] = None) -> float:
    """Score of the normalized window placed at offset ``t_o`` (lower = closer)."""
    if not 0.0 <= t_o <= pattern.t_end:
        raise OffsetOutOfRange(f"offset {t_o} outside [0, {pattern.t_end}]")
    with_time = cfg.norm_includes_time if cfg is not None else False
    return float(score_offsets(_normalized_array(w), pattern, [t_o], with_time)[0])


def full_grid(t_end: float, step: float) -> np.ndarray:
    """Offsets ``0, step, 2*step, ...`` up to and including ``t_end``."""
    k = int(math.floor(t_end / step + 1e-9))
    grid = np.arange(k + 1, dtype=float) * step
    grid = grid[grid <= t_end]
    if t_end - grid[-1] > 1e-9 * step:
        grid = np.append(grid, t_end)
    return grid


def potential_points(window_arr: np.ndarray, pattern: GoverningPattern, rel_threshold: float) -> np.ndarray:
    """Curve vertices whose features lie close to the window's feature mean."""
    mean = window_arr[:, 1:].mean(axis=0)
    verts = pattern.all_vertices()
    y = verts[:, 1:]
    rel = np.sqrt(((y - mean) ** 2).sum(axis=1)) / np.maximum(np.sqrt((y * y).sum(axis=1)), EPS)
    return verts[rel <= rel_threshold]


def potential_offsets(w: Window, pattern: GoverningPattern, cfg: MatchConfig = MatchConfig()) -> np.ndarray:
    """Candidate offsets around potential points, as a sorted subset of the full grid.

    Falls back to the full grid when no vertex qualifies.
    """
    arr = _normalized_array(w)
    step = cfg.step_for(pattern)
    grid = full_grid(pattern.t_end, step)
    points = potential_points(arr, pattern, cfg.potential_rel_threshold)
    if points.shape[0] == 0:
        return grid
    half = cfg.refine_halfwidth if cfg.refine_halfwidth is not None else float(arr[-1, 0])
    lo = np.floor((points[:, 0] - half) / step).astype(int)
    hi = np.ceil((points[:, 0] + half) / step).astype(int)
    lo = np.clip(lo, 0, len(grid) - 1)
    hi = np.clip(hi, 0, len(grid) - 1)
    # interval union over grid indices via a difference array
    marks = np.zeros(len(grid) + 1, dtype=int)
    np.add.at(marks, lo, 1)
    np.add.at(marks, hi + 1, -1)
    return grid[np.cumsum(marks[:-1]) > 0]


def match_offset(w: Window, pattern: GoverningPattern, cfg: MatchConfig = MatchConfig()) -> MatchResult:
    """Offset in ``[0, t_end]`` minimising the score; ties go to the smallest."""
    if pattern is None or not pattern.curves:
        raise EmptyPattern("cannot match against an empty pattern")
    arr = _normalized_array(w)
    if cfg.prune_enabled:
        candidates = potential_offsets(w, pattern, cfg)
    else:
        candidates = full_grid(pattern.t_end, cfg.step_for(pattern))
    scores = score_offsets(arr, pattern, candidates, cfg.norm_includes_time)
    best = int(np.argmin(scores))
    return MatchResult(float(candidates[best]), float(scores[best]), int(len(candidates)))

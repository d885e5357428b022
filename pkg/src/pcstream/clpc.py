"""Per-class principal curve extraction and governing-pattern assembly.

Curves grow from the first sample of a class towards its last one.  Each new
vertex is the mean of the still-active samples lying in a thin annulus around
the previous vertex; samples whose nearest part of the curve is already
finalized drop out of later steps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, NonMonotoneTime, TooFewSamples
from .model import GoverningPattern, PrincipalCurve, TimedSample, _segment_kernel, stack_samples


@dataclass(frozen=True)
class FitConfig:
    """Knobs of the curve fit.

    ``initial_radius=None`` means "distance from the first sample to its 5th
    nearest neighbour".  ``error_threshold`` defaults to no cap.
    """

    error_threshold: float = math.inf
    bar_width: float = 0.1
    initial_radius: Optional[float] = None
    angle_threshold_deg: float = 5.0

    def __post_init__(self):
        if not self.error_threshold > 0:
            raise ConfigError("error_threshold must be > 0")
        if not self.bar_width > 0:
            raise ConfigError("bar_width must be > 0")
        if self.initial_radius is not None and not self.initial_radius > 0:
            raise ConfigError("initial_radius must be > 0")
        if not 0 < self.angle_threshold_deg < 180:
            raise ConfigError("angle_threshold_deg must lie in (0, 180)")


def _as_array(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        return np.asarray(data, dtype=float)
    return stack_samples(list(data))


def _segment_distances(X, a, b):
    ab = b - a
    dist, _, _ = _segment_kernel(X, a, ab, (ab * ab).sum())
    return dist


def default_initial_radius(X: np.ndarray, k: int = 5) -> float:
    d = np.sqrt(((X[1:] - X[0]) ** 2).sum(axis=1))
    d = np.sort(d)
    r = float(d[min(k, len(d)) - 1])
    if r > 0:
        return r
    positive = d[d > 0]
    return float(positive[0]) if positive.size else 1.0


def fit_clpc(data, cfg: FitConfig = FitConfig(), class_id: int = 0) -> PrincipalCurve:
    """Fit one principal curve to the samples of a single class.

    Parameters
    ----------
    data : sequence of TimedSample or ndarray of shape (n, d + 1)
        Class samples in time order.
    cfg : FitConfig
    class_id : int
        Label attached to the returned curve.
    """
    X = _as_array(data)
    n = X.shape[0]
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples to fit a curve, got {n}")
    bad = np.nonzero(np.diff(X[:, 0]) <= 0)[0]
    if bad.size:
        raise NonMonotoneTime(f"sample times must strictly increase (row {bad[0] + 1})", row=int(bad[0] + 1))

    first, last = X[0], X[-1]
    if n == 2:
        return PrincipalCurve(np.vstack([first, last]), class_id)

    r0 = cfg.initial_radius if cfg.initial_radius is not None else default_initial_radius(X)
    verts = [first]
    active = np.ones(n, dtype=bool)
    active[[0, n - 1]] = False
    consumed = np.zeros(n, dtype=bool)
    consumed[0] = True
    to_final = np.full(n, np.inf)  # distance to the finalized prefix polyline
    to_final[0] = 0.0
    r = r0

    for _ in range(n):
        prev = verts[-1]
        pool = np.nonzero(active)[0]
        if pool.size == 0:
            break
        ring = np.sqrt(((X[pool] - prev) ** 2).sum(axis=1))
        band = pool[np.abs(ring - r) <= cfg.bar_width * r]
        if band.size:
            cand = X[band].mean(axis=0)
        else:
            # nothing at this radius: bridge to the next run of the class
            ahead = pool[X[pool, 0] > prev[0]]
            if ahead.size == 0:
                break
            cand = X[ahead[0]].copy()
        if not (prev[0] < cand[0] < last[0]):
            break

        new_final = np.minimum(to_final, _segment_distances(X, prev, cand))
        to_tail = _segment_distances(X, cand, last)
        newly = active & (new_final <= to_tail)
        now_consumed = consumed | newly
        if float(new_final[now_consumed].mean()) > cfg.error_threshold:
            break

        verts.append(cand)
        to_final = new_final
        consumed = now_consumed
        active &= ~newly
        r = r0 if not band.size else float(np.sqrt(((cand - prev) ** 2).sum()))
        if r <= 0:
            r = r0

    verts.append(last)
    return PrincipalCurve(np.vstack(verts), class_id)


def turning_angles(vertices: np.ndarray) -> np.ndarray:
    """Deviation from collinearity (degrees) at every interior vertex."""
    u = vertices[1:-1] - vertices[:-2]
    w = vertices[2:] - vertices[1:-1]
    cos = (u * w).sum(axis=1) / (np.sqrt((u * u).sum(axis=1)) * np.sqrt((w * w).sum(axis=1)))
    return np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))


def pruning_steps(curve: PrincipalCurve, angle_threshold_deg: float) -> Iterator[Tuple[int, float]]:
    """Yield ``(original_index, deviation)`` for each vertex removed, in order.

    The flattest interior vertex goes first (lowest index on ties); the loop
    re-evaluates the neighbours after every removal.
    """
    verts = curve.vertices
    keep = list(range(curve.K))
    while len(keep) > 2:
        dev = turning_angles(verts[keep])
        j = int(np.argmin(dev))
        if not dev[j] < angle_threshold_deg:
            return
        yield keep[j + 1], float(dev[j])
        del keep[j + 1]


def prune_low_angle(curve: PrincipalCurve, angle_threshold_deg: float = 5.0) -> PrincipalCurve:
    """Drop interior vertices that bend the curve by less than the threshold."""
    removed = {i for i, _ in pruning_steps(curve, angle_threshold_deg)}
    if not removed:
        return curve
    keep = [i for i in range(curve.K) if i not in removed]
    return curve.with_vertices(curve.vertices[keep])


def build_governing_pattern(curves: Sequence[PrincipalCurve]) -> GoverningPattern:
    """Sort curves by class and shift time so the earliest vertex sits at 0."""
    pattern = GoverningPattern(curves)
    shift = pattern.t_start
    if shift == 0.0:
        return pattern
    shifted = []
    for c in pattern.curves:
        v = c.vertices.copy()
        v[:, 0] -= shift
        shifted.append(c.with_vertices(v))
    return GoverningPattern(shifted)


def group_by_class(samples: Sequence[TimedSample]) -> Dict[int, List[TimedSample]]:
    groups: Dict[int, List[TimedSample]] = {}
    for s in samples:
        if s.label is None:
            raise ValueError("training samples must carry a label")
        groups.setdefault(int(s.label), []).append(s)
    return groups


def fit_pattern(samples: Sequence[TimedSample], cfg: FitConfig = FitConfig()) -> GoverningPattern:
    """Fit, prune and assemble a governing pattern from labeled samples."""
    curves = []
    for cls, group in sorted(group_by_class(samples).items()):
        curve = fit_clpc(group, cfg, class_id=cls)
        curves.append(prune_low_angle(curve, cfg.angle_threshold_deg))
    return build_governing_pattern(curves)

"""Samples, principal curves, the governing pattern and projection geometry.

Every geometric quantity lives in the joint ``(t, x_1, ..., x_d)`` space with
no per-axis weighting.  Curves are stored as ``(K, d + 1)`` float arrays whose
first column is time; the :class:`CurvePoint` view exists for callers that
want named fields.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateSegment, DimensionMismatch, DuplicateClass, EmptyPattern, InvalidCurve


@dataclass(frozen=True)
class TimedSample:
    """One observation of a stream."""

    t: float
    x: np.ndarray
    label: Optional[int] = None

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        x.setflags(write=False)
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", x)

    @property
    def d(self) -> int:
        return self.x.shape[0]

    def as_vector(self) -> np.ndarray:
        return np.concatenate(([self.t], self.x))

    def __eq__(self, other):
        if not isinstance(other, TimedSample):
            return NotImplemented
        return self.t == other.t and self.label == other.label and np.array_equal(self.x, other.x)

    __hash__ = None


@dataclass(frozen=True)
class CurvePoint:
    t: float
    y: np.ndarray

    def __post_init__(self):
        y = np.array(self.y, dtype=float).reshape(-1)
        y.setflags(write=False)
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "y", y)

    @classmethod
    def from_vector(cls, v) -> "CurvePoint":
        v = np.asarray(v, dtype=float)
        return cls(v[0], v[1:])

    def as_vector(self) -> np.ndarray:
        return np.concatenate(([self.t], self.y))

    def __eq__(self, other):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.y, other.y)

    __hash__ = None


def stack_samples(samples: Sequence[TimedSample]) -> np.ndarray:
    """Return an ``(n, d + 1)`` array of ``(t, x...)`` rows."""
    if len(samples) == 0:
        return np.empty((0, 0))
    return np.array([np.concatenate(([s.t], s.x)) for s in samples], dtype=float)


class PrincipalCurve:
    """Time-monotone polyline labeled with a single class.

    Parameters
    ----------
    points : array-like of shape (K, d + 1) or sequence of CurvePoint
        Vertices in time order; column 0 is time.
    class_id : int
        Class the curve represents.
    """

    __slots__ = ("_vertices", "class_id")

    def __init__(self, points, class_id: int):
        if len(points) and isinstance(points[0], CurvePoint):
            arr = np.array([p.as_vector() for p in points], dtype=float)
        else:
            arr = np.array(points, dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise InvalidCurve(f"curve vertices must be a (K, d+1) array with d >= 1, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise InvalidCurve(f"a curve needs at least 2 points, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise InvalidCurve("curve vertices must be finite")
        if not np.all(np.diff(arr[:, 0]) > 0):
            raise InvalidCurve("curve point times must be strictly increasing")
        arr.setflags(write=False)
        self._vertices = arr
        self.class_id = int(class_id)

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def points(self) -> tuple:
        return tuple(CurvePoint.from_vector(v) for v in self._vertices)

    @property
    def K(self) -> int:
        return self._vertices.shape[0]

    @property
    def d(self) -> int:
        return self._vertices.shape[1] - 1

    def with_vertices(self, vertices) -> "PrincipalCurve":
        return PrincipalCurve(vertices, self.class_id)

    def __len__(self):
        return self.K

    def __eq__(self, other):
        if not isinstance(other, PrincipalCurve):
            return NotImplemented
        return self.class_id == other.class_id and np.array_equal(self._vertices, other._vertices)

    __hash__ = None

    def __repr__(self):
        return f"PrincipalCurve(class_id={self.class_id}, K={self.K}, d={self.d})"


class GoverningPattern:
    """All per-class curves of a model, sorted by class id.

    The constructor validates but does not re-anchor time;
    :func:`pcstream.clpc.build_governing_pattern` performs the shift to the
    time origin.
    """

    __slots__ = ("curves", "_tables")

    def __init__(self, curves: Iterable[PrincipalCurve]):
        curves = sorted(curves, key=lambda c: c.class_id)
        if not curves:
            raise EmptyPattern("a governing pattern needs at least one curve")
        ids = [c.class_id for c in curves]
        if len(set(ids)) != len(ids):
            raise DuplicateClass(f"duplicate class ids in pattern: {ids}")
        dims = {c.d for c in curves}
        if len(dims) != 1:
            raise DimensionMismatch(f"curves disagree on feature dimension: {sorted(dims)}")
        self.curves = tuple(curves)
        self._tables = None

    @property
    def class_ids(self) -> tuple:
        return tuple(c.class_id for c in self.curves)

    @property
    def d(self) -> int:
        return self.curves[0].d

    @property
    def t_start(self) -> float:
        return min(float(c.vertices[0, 0]) for c in self.curves)

    @property
    def t_end(self) -> float:
        return max(float(c.vertices[-1, 0]) for c in self.curves)

    def curve_for(self, class_id: int) -> PrincipalCurve:
        for c in self.curves:
            if c.class_id == class_id:
                return c
        raise KeyError(class_id)

    def replace_curve(self, curve: PrincipalCurve) -> "GoverningPattern":
        return GoverningPattern([curve if c.class_id == curve.class_id else c for c in self.curves])

    def all_vertices(self) -> np.ndarray:
        return np.vstack([c.vertices for c in self.curves])

    def segment_tables(self):
        if self._tables is None:
            self._tables = tuple(_SegmentTable(c.vertices) for c in self.curves)
        return self._tables

    def __eq__(self, other):
        if not isinstance(other, GoverningPattern):
            return NotImplemented
        return self.curves == other.curves

    __hash__ = None

    def __repr__(self):
        return f"GoverningPattern(classes={list(self.class_ids)}, t_end={self.t_end:g})"


@dataclass(frozen=True)
class Projection:
    point: CurvePoint
    class_id: int
    segment_index: int
    distance: float
    arc_position: float


class BatchProjection(NamedTuple):
    """Vectorised projections of ``N`` query points; one row per point."""

    distance: np.ndarray
    foot: np.ndarray
    class_id: np.ndarray
    segment_index: np.ndarray
    arc_position: np.ndarray

    def row(self, i: int) -> Projection:
        return Projection(
            point=CurvePoint.from_vector(self.foot[i]),
            class_id=int(self.class_id[i]),
            segment_index=int(self.segment_index[i]),
            distance=float(self.distance[i]),
            arc_position=float(self.arc_position[i]),
        )


# -- geometry kernels ------------------------------------------------------
# The scalar and batched entry points all go through _segment_kernel so that a
# (point, segment) pair always produces bit-identical numbers.

def _segment_kernel(p, a, ab, denom):
    """Clamped projection of ``p`` onto segments ``a + s * ab``; broadcasts."""
    ap = p - a
    s = (ap * ab).sum(axis=-1) / denom
    s = np.minimum(np.maximum(s, 0.0), 1.0)
    foot = a + s[..., None] * ab
    diff = p - foot
    dist = np.sqrt((diff * diff).sum(axis=-1))
    return dist, s, foot


class _SegmentTable:
    __slots__ = ("a", "ab", "denom", "t0", "t1")

    def __init__(self, vertices: np.ndarray):
        self.a = vertices[:-1]
        self.ab = vertices[1:] - vertices[:-1]
        self.denom = (self.ab * self.ab).sum(axis=-1)
        self.t0 = vertices[:-1, 0]
        self.t1 = vertices[1:, 0]

    def __len__(self):
        return self.a.shape[0]


def _as_vector(p) -> np.ndarray:
    if isinstance(p, (CurvePoint,)):
        return p.as_vector()
    if isinstance(p, TimedSample):
        return p.as_vector()
    return np.asarray(p, dtype=float).reshape(-1)


def project_onto_segment(p, a, b):
    """Project ``p`` onto the closed segment ``[a, b]``.

    Returns ``(foot, arc_position, distance)`` with ``foot`` a
    :class:`CurvePoint`.
    """
    p, a, b = _as_vector(p), _as_vector(a), _as_vector(b)
    if not (p.shape == a.shape == b.shape):
        raise DimensionMismatch(f"shapes differ: {p.shape}, {a.shape}, {b.shape}")
    ab = b - a
    denom = (ab * ab).sum()
    if denom == 0.0:
        raise DegenerateSegment("segment endpoints coincide")
    dist, s, foot = _segment_kernel(p, a, ab, denom)
    return CurvePoint.from_vector(foot), float(s), float(dist)


def _curve_scan(points: np.ndarray, table: _SegmentTable):
    """Full scan of every segment; returns per-point best (dist, idx, s, foot)."""
    dist, s, foot = _segment_kernel(points[:, None, :], table.a[None], table.ab[None], table.denom[None])
    idx = np.argmin(dist, axis=1)
    rows = np.arange(points.shape[0])
    return dist[rows, idx], idx, s[rows, idx], foot[rows, idx]


def project_onto_curve(p, curve: PrincipalCurve) -> Projection:
    """Minimum-distance projection onto ``curve``; ties go to the lowest segment."""
    p = _as_vector(p)
    if p.shape[0] != curve.d + 1:
        raise DimensionMismatch(f"point has {p.shape[0]} coordinates, curve expects {curve.d + 1}")
    table = _SegmentTable(curve.vertices)
    dist, idx, s, foot = _curve_scan(p[None], table)
    return Projection(
        point=CurvePoint.from_vector(foot[0]),
        class_id=curve.class_id,
        segment_index=int(idx[0]),
        distance=float(dist[0]),
        arc_position=float(s[0]),
    )


def project_onto_curves_batch(points: np.ndarray, curve: PrincipalCurve) -> BatchProjection:
    points = np.asarray(points, dtype=float)
    dist, idx, s, foot = _curve_scan(points, _SegmentTable(curve.vertices))
    return BatchProjection(dist, foot, np.full(points.shape[0], curve.class_id), idx, s)


def _windowed_best(points, table: _SegmentTable, lo, hi):
    """Best segment per point restricted to index ranges ``[lo, hi)``."""
    n = points.shape[0]
    width = int(np.max(hi - lo)) if n else 0
    if width <= 0:
        inf = np.full(n, np.inf)
        return inf, np.zeros(n, dtype=int), np.zeros(n), np.zeros_like(points)
    idx = lo[:, None] + np.arange(width)[None, :]
    valid = idx < hi[:, None]
    idx = np.minimum(idx, len(table) - 1)
    dist, s, foot = _segment_kernel(points[:, None, :], table.a[idx], table.ab[idx], table.denom[idx])
    dist = np.where(valid, dist, np.inf)
    j = np.argmin(dist, axis=1)
    rows = np.arange(n)
    return dist[rows, j], idx[rows, j], s[rows, j], foot[rows, j]


def project_nearest_batch(points, pattern: GoverningPattern) -> BatchProjection:
    """Nearest-curve projection for every row of ``points``.

    Ties go to the lowest class id, then the lowest segment index.  Curves are
    time-monotone, so only segments whose time span lies within the current
    distance bound of a point's time can win; the search is restricted to
    that index range, which returns exactly what a full scan would.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[None]
    if points.shape[1] != pattern.d + 1:
        raise DimensionMismatch(f"points have {points.shape[1]} coordinates, pattern expects {pattern.d + 1}")
    n = points.shape[0]
    tables = pattern.segment_tables()
    t = points[:, 0]

    bound = np.full(n, np.inf)
    for table in tables:
        j = np.minimum(np.searchsorted(table.t1, t, side="left"), len(table) - 1)
        d, _, _ = _segment_kernel(points, table.a[j], table.ab[j], table.denom[j])
        bound = np.minimum(bound, d)
    margin = 1e-9 * (bound + np.abs(t) + 1.0)

    best_dist = np.full(n, np.inf)
    best_foot = np.zeros_like(points)
    best_cls = np.zeros(n, dtype=int)
    best_seg = np.zeros(n, dtype=int)
    best_s = np.zeros(n)
    for curve, table in zip(pattern.curves, tables):
        lo = np.searchsorted(table.t1, t - bound - margin, side="left")
        hi = np.searchsorted(table.t0, t + bound + margin, side="right")
        dist, idx, s, foot = _windowed_best(points, table, lo, hi)
        better = dist < best_dist
        best_dist = np.where(better, dist, best_dist)
        best_foot[better] = foot[better]
        best_cls[better] = curve.class_id
        best_seg[better] = idx[better]
        best_s[better] = s[better]
    return BatchProjection(best_dist, best_foot, best_cls, best_seg, best_s)


def project_nearest(p, pattern: GoverningPattern) -> Projection:
    """Projection onto the nearest curve of ``pattern``."""
    return project_nearest_batch(_as_vector(p)[None], pattern).row(0)

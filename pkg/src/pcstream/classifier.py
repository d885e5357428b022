"""Label prediction from the matched offset and the online curve update."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidClass
from .matching import MatchConfig, MatchResult, Window, _normalized_array, match_offset
from .model import GoverningPattern, Projection, project_nearest

TIME_CLAMP_FRACTION = 1e-9


@dataclass(frozen=True)
class LearningConfig:
    alpha: float = 0.5
    enabled: bool = True

    def __post_init__(self):
        # alpha == 0 is accepted as an explicit no-op
        if not self.alpha >= 0:
            raise ConfigError("alpha must be >= 0")


@dataclass(frozen=True)
class PredictionOutcome:
    predicted_class: int
    match: MatchResult
    projection: Projection
    query_point: np.ndarray  # newest sample after the matched time shift


def predict_label(w: Window, pattern: GoverningPattern, cfg: MatchConfig = MatchConfig()) -> PredictionOutcome:
    """Match the window, shift its newest sample and take the nearest curve's class."""
    match = match_offset(w, pattern, cfg)
    x = _normalized_array(w)[-1].copy()
    x[0] += match.t_offset
    proj = project_nearest(x, pattern)
    x.setflags(write=False)
    return PredictionOutcome(proj.class_id, match, proj, x)


def _clamp_times(verts: np.ndarray, i: int, j: int, old: np.ndarray) -> None:
    """Restore strict time order after moving vertices ``i`` and ``j = i + 1``.

    The moved times are clipped into the open interval spanned by their
    neighbours, keeping a margin of a tiny fraction of that gap (never less
    than a few ulps) and leaving room for ``j`` after ``i``.  When the
    neighbours are too close for that, both keep their previous times.
    """
    K = verts.shape[0]
    lo = verts[i - 1, 0] if i > 0 else -np.inf
    hi = verts[j + 1, 0] if j < K - 1 else np.inf
    if np.isfinite(lo) and np.isfinite(hi):
        m = TIME_CLAMP_FRACTION * (hi - lo)
    else:
        m = TIME_CLAMP_FRACTION * max(old[j, 0] - old[i, 0], 1.0)
    scale = max(abs(v) for v in (lo, hi, verts[i, 0], verts[j, 0]) if np.isfinite(v))
    m = max(m, 4.0 * np.spacing(scale))

    ti = min(max(verts[i, 0], lo + m), hi - 2.0 * m)
    tj = min(max(verts[j, 0], ti + m), hi - m)
    if not lo < ti < tj < hi:
        ti, tj = old[i, 0], old[j, 0]
    verts[i, 0], verts[j, 0] = ti, tj


def online_update(
    pattern: GoverningPattern,
    outcome: PredictionOutcome,
    true_class: int,
    cfg: LearningConfig = LearningConfig(),
) -> GoverningPattern:
    """Move the two vertices bracketing the projection foot along the error vector.

    A correct prediction pulls the segment towards the sample by ``alpha``
    times the error vector; a wrong one pushes it away by the same amount.
    Only the predicted class's curve changes.
    """
    if isinstance(true_class, bool) or not isinstance(true_class, (int, np.integer)) or true_class < 0:
        raise InvalidClass(f"invalid class id {true_class!r}")
    if not cfg.enabled:
        return pattern
    try:
        curve = pattern.curve_for(outcome.predicted_class)
    except KeyError:
        raise InvalidClass(f"predicted class {outcome.predicted_class} is not in the pattern") from None

    foot = outcome.projection.point.as_vector()
    error = np.asarray(outcome.query_point, dtype=float) - foot
    sign = 1.0 if int(true_class) == outcome.predicted_class else -1.0
    i = outcome.projection.segment_index
    j = i + 1

    old = curve.vertices
    verts = old.copy()
    verts[i] += sign * cfg.alpha * error
    verts[j] += sign * cfg.alpha * error
    _clamp_times(verts, i, j, old)
    return pattern.replace_curve(curve.with_vertices(verts))

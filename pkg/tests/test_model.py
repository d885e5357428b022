import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcstream.errors import DegenerateSegment, DimensionMismatch, DuplicateClass, InvalidCurve
from pcstream.model import (
    GoverningPattern,
    PrincipalCurve,
    TimedSample,
    project_nearest,
    project_nearest_batch,
    project_onto_curve,
    project_onto_segment,
)

coord = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def random_curve(rng, k, d=1, class_id=0, t0=0.0):
    t = t0 + np.cumsum(rng.uniform(0.1, 3.0, size=k))
    y = rng.uniform(-5, 5, size=(k, d))
    return PrincipalCurve(np.column_stack([t, y]), class_id)


@st.composite
def curves(draw, d=1, min_k=2, max_k=8):
    k = draw(st.integers(min_k, max_k))
    gaps = draw(st.lists(st.floats(0.05, 5.0), min_size=k, max_size=k))
    ys = draw(st.lists(st.lists(coord, min_size=d, max_size=d), min_size=k, max_size=k))
    t = np.cumsum(gaps)
    return PrincipalCurve(np.column_stack([t, np.array(ys)]), 0)


# -- single segment ---------------------------------------------------------

@pytest.mark.parametrize(
    "p, a, b, foot, arc, dist",
    [
        ((5, 3), (0, 0), (10, 0), (5, 0), 0.5, 3.0),
        ((12, 0), (0, 0), (10, 0), (10, 0), 1.0, 2.0),
        ((3, 4), (0, 0), (6, 8), (3, 4), 0.5, 0.0),
    ],
)
def test_segment_examples(p, a, b, foot, arc, dist):
    f, s, d = project_onto_segment(p, a, b)
    assert np.allclose(f.as_vector(), foot)
    assert s == pytest.approx(arc)
    assert d == pytest.approx(dist, abs=1e-12)


def test_degenerate_segment():
    with pytest.raises(DegenerateSegment):
        project_onto_segment((1, 1), (2, 2), (2, 2))


def test_segment_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        project_onto_segment((1, 1, 1), (0, 0), (1, 0))


# -- curves -----------------------------------------------------------------

def test_curve_validation():
    with pytest.raises(InvalidCurve):
        PrincipalCurve([[0, 0]], 0)
    with pytest.raises(InvalidCurve):
        PrincipalCurve([[0, 0], [0, 1]], 0)
    with pytest.raises(InvalidCurve):
        PrincipalCurve([[0, 0], [1, np.nan]], 0)


def test_point_on_vertex():
    c = PrincipalCurve([[0, 0], [1, 2], [2, 1], [4, 3]], 0)
    pr = project_onto_curve(c.vertices[2], c)
    assert pr.distance == 0.0
    assert np.array_equal(pr.point.as_vector(), c.vertices[2])


def test_right_angle_tie_goes_to_lower_segment():
    # x-axis plays the role of time here; the corner is at t=10 so the curve stays monotone
    c = PrincipalCurve([[0, 0], [10, 0], [10 + 1e-12, 10]], 0)
    pr = project_onto_curve((5, 5), c)
    assert pr.segment_index == 0
    assert pr.distance == pytest.approx(5.0)
    assert np.allclose(pr.point.as_vector(), (5, 0))


def test_nearest_class_examples():
    a = PrincipalCurve([[0, 0], [10, 0]], 0)
    b = PrincipalCurve([[0, 5], [10, 5]], 1)
    c = PrincipalCurve([[0, 10], [10, 10]], 2)
    pat = GoverningPattern([c, a, b])
    pr = project_nearest((4, 5), pat)
    assert pr.class_id == 1 and pr.distance == 0.0
    # equidistant between classes 0 and 2 with class 1 removed
    pat2 = GoverningPattern([a, c])
    assert project_nearest((4, 5), pat2).class_id == 0


def test_pattern_validation():
    a = PrincipalCurve([[0, 0], [1, 0]], 0)
    with pytest.raises(DuplicateClass):
        GoverningPattern([a, a])
    with pytest.raises(DimensionMismatch):
        GoverningPattern([a, PrincipalCurve([[0, 0, 0], [1, 0, 0]], 1)])


def test_timed_sample_is_read_only():
    s = TimedSample(1.0, [1.0, 2.0], 0)
    with pytest.raises(ValueError):
        s.x[0] = 3.0


def dense_oracle(p, vertices, n=100_000):
    """Min distance to ~n points spread along the polyline by length; every vertex is sampled."""
    seg = np.diff(vertices, axis=0)
    lengths = np.sqrt((seg * seg).sum(axis=1))
    counts = np.maximum(2, np.round(n * lengths / lengths.sum()).astype(int))
    pts = np.vstack([a + np.linspace(0.0, 1.0, m)[:, None] * ab for a, ab, m in zip(vertices[:-1], seg, counts)])
    return float(np.sqrt(((pts - p) ** 2).sum(axis=1)).min())


def test_dense_sampling_oracle_small():
    rng = np.random.default_rng(1)
    for _ in range(50):
        c = random_curve(rng, int(rng.integers(2, 7)), d=int(rng.integers(1, 3)))
        p = np.concatenate(([rng.uniform(0, c.vertices[-1, 0])], rng.uniform(-6, 6, c.d)))
        assert abs(project_onto_curve(p, c).distance - dense_oracle(p, c.vertices)) <= 1e-6


def test_batch_matches_scalar_bitwise():
    rng = np.random.default_rng(2)
    pat = GoverningPattern([random_curve(rng, 12, 2, k) for k in range(3)])
    pts = np.column_stack([rng.uniform(-2, 30, 400), rng.uniform(-6, 6, (400, 2))])
    batch = project_nearest_batch(pts, pat)
    for i in range(len(pts)):
        per = [project_onto_curve(pts[i], c) for c in pat.curves]
        best = min(per, key=lambda pr: (pr.distance, pr.class_id))
        assert batch.distance[i] == best.distance
        assert batch.class_id[i] == best.class_id
        assert batch.segment_index[i] == best.segment_index


# -- properties ---------------------------------------------------------------

@given(curves(), st.tuples(coord, coord))
def test_projection_no_worse_than_any_vertex(c, p):
    d = project_onto_curve(p, c).distance
    vd = np.sqrt(((c.vertices - np.array(p)) ** 2).sum(axis=1))
    assert d <= vd.min() + 1e-9


@given(curves(), st.tuples(coord, coord))
def test_projection_idempotent(c, p):
    pr = project_onto_curve(p, c)
    again = project_onto_curve(pr.point.as_vector(), c)
    assert again.distance <= 1e-9 * (1 + np.abs(c.vertices).max())
    assert np.allclose(again.point.as_vector(), pr.point.as_vector(), atol=1e-9)


@settings(max_examples=50)
@given(st.lists(curves(), min_size=1, max_size=4), st.tuples(coord, coord))
def test_nearest_equals_min_over_curves(cs, p):
    cs = [PrincipalCurve(c.vertices, k) for k, c in enumerate(cs)]
    pat = GoverningPattern(cs)
    pr = project_nearest(p, pat)
    per = [project_onto_curve(p, c).distance for c in cs]
    assert pr.distance == min(per)
    assert pr.class_id == int(np.argmin(per))
    # deterministic
    again = project_nearest(p, pat)
    assert (again.class_id, again.segment_index, again.distance) == (pr.class_id, pr.segment_index, pr.distance)


def test_projection_distance_finite_for_far_points():
    c = PrincipalCurve([[0, 0], [1, 1]], 0)
    assert math.isfinite(project_onto_curve((1e6, -1e6), c).distance)

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pcstream.classifier import LearningConfig, PredictionOutcome, online_update, predict_label
from pcstream.errors import ConfigError, InvalidClass
from pcstream.matching import MatchConfig, MatchResult, Window
from pcstream.model import (
    GoverningPattern,
    PrincipalCurve,
    project_nearest,
    project_onto_curve,
    project_onto_segment,
)


def outcome_for(pattern, x):
    x = np.asarray(x, dtype=float)
    proj = project_nearest(x, pattern)
    return PredictionOutcome(proj.class_id, MatchResult(0.0, 0.0, 1), proj, x)


def three_lines():
    return GoverningPattern(
        [PrincipalCurve([[0, 0], [10, 0]], 0), PrincipalCurve([[0, 4], [10, 4]], 1), PrincipalCurve([[0, 8], [10, 8]], 2)]
    )


# -- prediction -----------------------------------------------------------------

def test_prediction_on_class_two_curve():
    pat = three_lines()
    w = Window.from_array([[0, 8], [1, 8], [2, 8]])
    out = predict_label(w, pat, MatchConfig(prune_enabled=False))
    assert out.predicted_class == 2
    assert out.projection.distance == 0.0


def test_prediction_tie_goes_to_lower_class():
    pat = GoverningPattern([PrincipalCurve([[0, 0], [10, 0]], 0), PrincipalCurve([[0, 4], [10, 4]], 1)])
    w = Window.from_array([[0, 2], [1, 2]])
    assert predict_label(w, pat).predicted_class == 0


def test_prediction_equals_per_class_oracle():
    rng = np.random.default_rng(11)
    for _ in range(30):
        curves = []
        for cls in range(3):
            t = np.cumsum(rng.uniform(0.3, 2.0, 6))
            curves.append(PrincipalCurve(np.column_stack([t, rng.uniform(0, 5, 6)]), cls))
        pat = GoverningPattern(curves)
        rows = np.column_stack([np.cumsum(rng.uniform(0.1, 0.5, 4)), rng.uniform(0, 5, 4)])
        out = predict_label(Window.from_array(rows), pat)
        x = out.query_point
        dists = [project_onto_curve(x, c).distance for c in curves]
        assert out.predicted_class == int(np.argmin(dists))
        assert out.projection.distance == min(dists)


# -- update -------------------------------------------------------------------

def test_correct_update_example():
    pat = GoverningPattern([PrincipalCurve([[0, 0], [10, 0]], 0)])
    out = outcome_for(pat, [5, 2])
    new = online_update(pat, out, 0, LearningConfig(alpha=0.5))
    assert new.curves[0].vertices.tolist() == [[0, 1], [10, 1]]
    _, _, d = project_onto_segment([5, 2], *new.curves[0].vertices)
    assert d == pytest.approx(1.0)


def test_wrong_update_example():
    pat = GoverningPattern([PrincipalCurve([[0, 0], [10, 0]], 0), PrincipalCurve([[0, 9], [10, 9]], 1)])
    out = outcome_for(pat, [5, 2])
    new = online_update(pat, out, 1, LearningConfig(alpha=0.5))
    assert new.curves[0].vertices.tolist() == [[0, -1], [10, -1]]
    assert new.curves[1] == pat.curves[1]
    _, _, d = project_onto_segment([5, 2], *new.curves[0].vertices)
    assert d > 2.0


def test_disabled_is_identity():
    pat = three_lines()
    out = outcome_for(pat, [5, 1])
    assert online_update(pat, out, 0, LearningConfig(enabled=False)) is pat


def test_invalid_true_class():
    pat = three_lines()
    out = outcome_for(pat, [5, 1])
    with pytest.raises(InvalidClass):
        online_update(pat, out, -1)
    with pytest.raises(InvalidClass):
        online_update(pat, out, 1.5)


def test_negative_alpha_rejected():
    with pytest.raises(ConfigError):
        LearningConfig(alpha=-0.1)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 1.0])
def test_perpendicular_error_shrinks_by_one_minus_alpha(alpha):
    rng = np.random.default_rng(int(alpha * 10))
    for _ in range(200):
        a = np.array([0.0, *rng.uniform(-5, 5, 2)])
        b = np.array([rng.uniform(1, 10), *rng.uniform(-5, 5, 2)])
        ab = b - a
        n = rng.normal(size=3)
        n -= n.dot(ab) / ab.dot(ab) * ab
        n *= rng.uniform(0.1, 3) / np.linalg.norm(n)
        x = a + rng.uniform(0.2, 0.8) * ab + n
        pat = GoverningPattern([PrincipalCurve([a, b], 0)])
        out = outcome_for(pat, x)
        before = out.projection.distance
        new = online_update(pat, out, 0, LearningConfig(alpha=alpha))
        _, _, after = project_onto_segment(x, *new.curves[0].vertices)
        assert abs(after - (1 - alpha) * before) <= 1e-9


def test_attract_then_repel_restores():
    rng = np.random.default_rng(12)
    for _ in range(200):
        t = np.cumsum(rng.uniform(1, 3, 6))
        pat = GoverningPattern([PrincipalCurve(np.column_stack([t, rng.uniform(0, 5, 6)]), 0), PrincipalCurve([[0, 50], [30, 50]], 1)])
        x = np.array([rng.uniform(t[0], t[-1]), rng.uniform(0, 5)])
        out = outcome_for(pat, x)
        cfg = LearningConfig(alpha=float(rng.uniform(0.05, 0.5)))
        moved = online_update(pat, out, 0, cfg)
        back = online_update(moved, out, 1, cfg)
        assert np.max(np.abs(back.curves[0].vertices - pat.curves[0].vertices)) <= 1e-9


def test_update_touches_two_points_of_one_curve():
    pat = three_lines()
    pat = GoverningPattern([c.with_vertices(np.array([[0, c.vertices[0, 1]], [5, c.vertices[0, 1]], [10, c.vertices[0, 1]]])) for c in pat.curves])
    out = outcome_for(pat, [2, 5])
    new = online_update(pat, out, 2)
    changed = [(c.class_id, i) for c, o in zip(new.curves, pat.curves) for i in range(c.K) if not np.array_equal(c.vertices[i], o.vertices[i])]
    assert len(changed) == 2 and {cls for cls, _ in changed} == {out.predicted_class}
    assert [c.K for c in new.curves] == [c.K for c in pat.curves]


def test_time_monotone_after_many_random_updates():
    rng = np.random.default_rng(13)
    curves = []
    for cls in range(3):
        t = np.cumsum(rng.uniform(0.01, 1.0, 20))
        curves.append(PrincipalCurve(np.column_stack([t, rng.uniform(0, 5, (20, 2))]), cls))
    pat = GoverningPattern(curves)
    t_end = pat.t_end
    for _ in range(10_000):
        x = np.array([rng.uniform(-1, t_end + 1), *rng.uniform(-3, 8, 2)])
        out = outcome_for(pat, x)
        pat = online_update(pat, out, int(rng.integers(0, 3)), LearningConfig(alpha=float(rng.uniform(0, 1.5))))
        for c in pat.curves:
            assert np.all(np.diff(c.vertices[:, 0]) > 0)


@given(st.floats(0.0, 1.0), st.floats(-5, 5))
def test_alpha_zero_is_noop(scale, y):
    pat = three_lines()
    out = outcome_for(pat, [5, y])
    new = online_update(pat, out, 0, LearningConfig(alpha=0.0))
    assert new == pat

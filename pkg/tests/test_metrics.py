import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pcstream.metrics import ConfusionCounts, MetricsReport, f_score, g_score, record_query


def one_class(tp, fp, fn):
    # class 0 gets the counts; class 1 soaks up the off-diagonal mass
    return ConfusionCounts(np.array([[tp, fn], [fp, 0]]))


def test_perfect_class():
    c = one_class(5, 0, 0)
    assert f_score(c).per_class[0] == 1.0
    assert g_score(c).per_class[0] == 1.0


def test_worked_case():
    c = one_class(3, 1, 2)
    assert f_score(c).per_class[0] == 6 / 9
    assert g_score(c).per_class[0] == 0.5


def test_zero_support_is_flagged():
    c = ConfusionCounts(np.array([[4, 0], [0, 0]]))
    f, g = f_score(c), g_score(c)
    assert f.per_class[1] == 0.0 and 1 in f.zero_denominator
    assert g.per_class[1] == 0.0 and 1 in g.zero_denominator
    assert f.macro == 0.5


def test_beta_weighting():
    c = one_class(3, 1, 2)
    assert f_score(c, beta=2).per_class[0] == pytest.approx(5 * 3 / (5 * 3 + 1 + 4 * 2))
    assert g_score(c, beta=2).per_class[0] == pytest.approx(3 / (3 + 1 + 2 * 2))


def test_from_labels_and_accuracy():
    c = ConfusionCounts.from_labels([0, 1, 2, 2, 1], [0, 2, 2, 2, 1], 3)
    assert c.tp.tolist() == [1, 1, 2]
    assert c.fp.tolist() == [0, 0, 1]
    assert c.fn.tolist() == [0, 1, 0]
    r = MetricsReport(c)
    assert r.accuracy == 4 / 5
    assert int(c.tp.sum()) == 4


@given(st.lists(st.lists(st.integers(0, 50), min_size=4, max_size=4), min_size=4, max_size=4))
def test_g_never_exceeds_f(rows):
    c = ConfusionCounts(np.array(rows))
    f, g = f_score(c), g_score(c)
    for k in range(4):
        assert g.per_class[k] <= f.per_class[k]
        assert 0.0 <= g.per_class[k] <= 1.0
    assert 0.0 <= g.macro <= f.macro <= 1.0


def test_query_tallies():
    r = MetricsReport(ConfusionCounts.empty(3))
    r = record_query(r, 1, 2)
    assert (r.apt_queries, r.inapt_queries) == (1, 0)
    r = record_query(r, 1, 1)
    assert (r.apt_queries, r.inapt_queries) == (1, 1)
    r = MetricsReport(ConfusionCounts.empty(2), apt_queries=3, inapt_queries=7)
    assert r.apt_ratio == 0.3
    assert r.total_queries == 10
    assert MetricsReport(ConfusionCounts.empty(2)).apt_ratio is None


def test_merge_adds_everything():
    a = MetricsReport(ConfusionCounts(np.array([[1, 2], [0, 3]])), 1, 2)
    b = MetricsReport(ConfusionCounts(np.array([[4, 0], [1, 1]])), 3, 0)
    m = a.merge(b)
    assert m.counts.matrix.tolist() == [[5, 2], [1, 4]]
    assert (m.apt_queries, m.inapt_queries) == (4, 2)


def test_to_dict_is_json_ready():
    import json

    r = MetricsReport(ConfusionCounts(np.array([[1, 2], [0, 3]])), 1, 2)
    doc = json.loads(json.dumps(r.to_dict()))
    assert doc["confusion_matrix"] == [[1, 2], [0, 3]]
    assert doc["per_class"][0]["tp"] == 1

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import is_ec_explanation, min_flip_size
from sparse_explain import (LinearModel, Prediction, ResourceError, SparseInstance, evidence,
                            explain_complete, explain_greedy, explain_linear, predict)
from sparse_explain.ec import SearchMethod, complete_search_cost

a, b, c = 0, 1, 2


def inst(*active):
    return SparseInstance(0, tuple(sorted(active)))


@pytest.fixture
def m51():
    return LinearModel({a: 5.0, b: 1.0}, 0.0, 4.0)


@pytest.fixture
def m321():
    return LinearModel({a: 3.0, b: 2.0, c: 1.0}, 0.0, 0.5)


def test_linear_single_feature(m51):
    exp = explain_linear(m51, inst(a, b))
    assert exp.features == {a}
    assert exp.search_method is SearchMethod.LINEAR_RANK
    assert exp.original_class is Prediction.POSITIVE
    assert exp.flipped_class is Prediction.NEGATIVE
    assert is_ec_explanation(m51, inst(a, b), exp.features)
    assert min_flip_size(m51, inst(a, b)) == 1


def test_linear_needs_everything(m321):
    exp = explain_linear(m321, inst(a, b, c))
    assert exp.features == {a, b, c}
    assert min_flip_size(m321, inst(a, b, c)) == 3


def test_linear_none_when_intercept_wins():
    model = LinearModel({a: 1.0}, 1.0, 0.5)
    assert explain_linear(model, inst(a)) is None
    assert explain_greedy(model, inst(a)) is None
    assert explain_complete(model, inst(a), 1) is None


def test_negative_prediction_not_explained(m51):
    assert explain_linear(m51, inst(b)) is None
    assert explain_greedy(m51, inst(b)) is None
    assert explain_complete(m51, inst(b), 2) is None


def test_complete_examples(m51):
    assert explain_complete(m51, inst(a, b), 2).features == {a}
    tie = LinearModel({a: 1.0, b: 1.0}, 0.0, 1.5)
    exp = explain_complete(tie, inst(a, b), 2)
    assert exp.features == {a}
    assert exp.search_method is SearchMethod.COMPLETE


def test_complete_respects_max_size(m321):
    assert explain_complete(m321, inst(a, b, c), 2) is None
    assert explain_complete(m321, inst(a, b, c), 3).features == {a, b, c}


def test_complete_budget():
    model = LinearModel({j: 1.0 for j in range(30)}, 0.0, 0.5)
    x = inst(*range(30))
    assert complete_search_cost(30, 3) == 30 + 435 + 4060
    with pytest.raises(ResourceError, match="budget"):
        explain_complete(model, x, 3, budget=1000)


def test_greedy_examples(m51, m321):
    assert explain_greedy(m51, inst(a, b)).features == {a}
    assert explain_greedy(m321, inst(a, b, c)).features == {a, b, c}
    assert explain_greedy(m51, inst(a, b)).search_method is SearchMethod.GREEDY


def test_greedy_skips_negative_evidence():
    model = LinearModel({a: 2.0, b: -1.0, c: 1.0}, 0.0, 1.5)
    exp = explain_greedy(model, inst(a, b, c))
    assert exp.features == {a}
    assert is_ec_explanation(model, inst(a, b, c), exp.features)


weights_st = st.floats(-3, 3, allow_nan=False).map(lambda w: round(w, 3))


@st.composite
def small_case(draw):
    m = draw(st.integers(1, 10))
    weights = {j: draw(weights_st) for j in range(m)}
    active = draw(st.lists(st.integers(0, m - 1), unique=True, min_size=1))
    model = LinearModel(weights, draw(weights_st), draw(weights_st), m)
    return model, inst(*active)


@settings(max_examples=300, deadline=None)
@given(small_case())
def test_searches_agree_with_brute_force(case):
    model, x = case
    expected = min_flip_size(model, x) if predict(model, x) is Prediction.POSITIVE else None
    results = [explain_linear(model, x), explain_greedy(model, x),
               explain_complete(model, x, len(x.active))]
    for exp in results:
        if expected is None:
            assert exp is None
        else:
            assert exp.size == expected
            assert is_ec_explanation(model, x, exp.features)


@settings(max_examples=200, deadline=None)
@given(small_case())
def test_linear_is_evidence_prefix_and_readding_restores(case):
    model, x = case
    exp = explain_linear(model, x)
    if exp is None:
        return
    prefix = [j for j, _ in evidence(model, x)][:exp.size]
    assert exp.features == set(prefix)
    kept = set(x.active) - exp.features
    for j in exp.features:
        assert predict(model, x, kept | {j}) is Prediction.POSITIVE

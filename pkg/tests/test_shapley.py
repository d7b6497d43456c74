import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import shapley_by_permutations
from sparse_explain import (Coalition, ContractError, LinearModel, ResourceError,
                            SparseInstance, VotingGame, approx_shapley, build_game,
                            exact_shapley, marginal_utility, predict, Prediction)
from sparse_explain.shapley import ShapleyMethod, explain_shapley, permutation_swings

a, b, c, d, e = range(5)


def game(weights, q):
    return VotingGame(tuple(sorted(weights)), dict(weights), q)


def test_build_game_folds_intercept():
    model = LinearModel({a: 2.0, b: 1.0}, intercept=0.2, threshold=0.5)
    g = build_game(model, SparseInstance(0, (a, b)))
    assert g.players == (a, b)
    assert g.weights == {a: 2.0, b: 1.0}
    assert g.effective_threshold == pytest.approx(0.3)


def test_build_game_empty_instance():
    model = LinearModel({a: 2.0}, intercept=1.0, threshold=0.5)
    g = build_game(model, SparseInstance(0, ()))
    assert g.n == 0 and g.value(()) == 1


def test_build_game_unweighted_feature():
    model = LinearModel({a: 2.0}, num_features=4)
    assert build_game(model, SparseInstance(0, (a, 3))).weights[3] == 0.0


def test_marginal_utility():
    g = game({a: 3.0, b: 1.0, c: 5.0, e: -2.0}, 2.0)
    assert marginal_utility(g, Coalition.of(g, ()), a) == 1
    assert marginal_utility(g, Coalition.of(g, {c}), b) == 0
    assert marginal_utility(g, Coalition.of(g, {a}), e) == -1
    with pytest.raises(ContractError):
        marginal_utility(g, Coalition.of(g, {a}), a)


def test_exact_three_players():
    att = exact_shapley(game({a: 2.0, b: 1.0, c: 1.0}, 2.5))
    assert att.method is ShapleyMethod.EXACT and att.samples == 0
    assert att.values[a] == pytest.approx(2 / 3, abs=1e-12)
    assert att.values[b] == pytest.approx(1 / 6, abs=1e-12)
    assert att.values[c] == pytest.approx(1 / 6, abs=1e-12)


def test_exact_single_and_dummy():
    assert exact_shapley(game({a: 1.0}, 0.5)).values == {a: 1.0}
    vals = exact_shapley(game({a: 3.0, d: 0.0}, 2.0)).values
    assert vals[a] == 1.0 and vals[d] == 0.0


def test_exact_limit():
    with pytest.raises(ResourceError, match="approx_shapley"):
        exact_shapley(game({j: 1.0 for j in range(21)}, 3.0))


def test_approx_rejects_zero_samples():
    with pytest.raises(ContractError):
        approx_shapley(game({a: 1.0}, 0.5), samples=0)


def test_approx_single_player():
    for q, expected in ((0.5, 1.0), (2.0, 0.0), (-1.0, 0.0)):
        att = approx_shapley(game({a: 1.0}, q), samples=17, seed=3)
        assert att.values == {a: expected}


def test_approx_three_players_close_to_exact():
    att = approx_shapley(game({a: 2.0, b: 1.0, c: 1.0}, 2.5), samples=20_000, seed=7)
    exact = {a: 2 / 3, b: 1 / 6, c: 1 / 6}
    assert max(abs(att.values[p] - exact[p]) for p in exact) <= 0.02
    assert att.samples == 20_000 and att.seed == 7


def test_approx_deterministic_given_seed():
    g = game({j: w for j, w in enumerate([0.5, -0.2, 1.1, 0.3, 0.9])}, 1.0)
    assert approx_shapley(g, 500, seed=4).values == approx_shapley(g, 500, seed=4).values


def test_approx_converges_on_negative_weights():
    # Dyadic weights and an odd multiple of 1/8 as quota: no coalition ties.
    g = game({a: 2.0, b: -1.5, c: 1.0, d: 0.75, e: -0.25}, 1.125)
    exact = exact_shapley(g).values
    approx = approx_shapley(g, 100_000, seed=1).values
    for p in exact:
        assert approx[p] == pytest.approx(exact[p], abs=0.01)


def test_explain_shapley_switches_to_monte_carlo():
    model = LinearModel({j: 0.1 for j in range(25)}, 0.0, 1.0)
    x = SparseInstance(3, tuple(range(25)))
    att = explain_shapley(model, x, samples=200, seed=5)
    assert att.method is ShapleyMethod.MONTE_CARLO and att.instance_id == 3
    again = explain_shapley(model, x, samples=200, seed=5)
    assert att.values == again.values
    small = explain_shapley(model, SparseInstance(4, tuple(range(12))))
    assert small.method is ShapleyMethod.EXACT


# Weights from a small integer set make equal-weight pairs common; half-integer
# quotas keep every coalition sum off the threshold.
int_weight = st.integers(-3, 5).map(float)


@st.composite
def small_game(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    w = {j: draw(int_weight) for j in range(n)}
    q = draw(st.integers(-4, 12)) + 0.5
    return game(w, q)


@settings(max_examples=60, deadline=None)
@given(small_game())
def test_subset_formula_matches_permutations(g):
    brute, count = shapley_by_permutations(g.weights, g.effective_threshold)
    assert count == math.factorial(g.n)
    exact = exact_shapley(g).values
    for p in g.players:
        assert exact[p] == pytest.approx(brute[p], abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(small_game())
def test_axioms(g):
    vals = exact_shapley(g).values
    total = g.value(g.players) - g.value(())
    assert math.fsum(vals.values()) == pytest.approx(total, abs=1e-9)
    for p in g.players:
        if g.weights[p] == 0.0:
            assert vals[p] == 0.0
        for r in g.players:
            if g.weights[p] == g.weights[r]:
                assert vals[p] == vals[r]


@settings(max_examples=50, deadline=None)
@given(small_game(), st.floats(0.01, 100))
def test_scaling_weights_and_quota_is_invariant(g, scale):
    scaled = game({p: w * scale for p, w in g.weights.items()}, g.effective_threshold * scale)
    assert exact_shapley(scaled).values == pytest.approx(exact_shapley(g).values, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(small_game(), st.integers(1, 300), st.integers(0, 2**32))
def test_monte_carlo_telescopes(g, samples, seed):
    totals = permutation_swings(g, samples, np.random.default_rng(seed))
    assert int(totals.sum()) == samples * (g.value(g.players) - g.value(()))


def test_game_victory_matches_prediction():
    model = LinearModel({a: 1.25, b: -0.5, c: 0.75}, intercept=-0.25, threshold=0.5)
    x = SparseInstance(0, (a, b, c))
    g = build_game(model, x)
    for mask in [(), (a,), (a, b), (a, c), (a, b, c), (c,)]:
        assert g.value(mask) == int(predict(model, x, set(mask)) is Prediction.POSITIVE)

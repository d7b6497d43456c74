import itertools

import pytest

ACCEPTANCE_RESULTS = []


def record(criterion, ok, detail=""):
    ACCEPTANCE_RESULTS.append((criterion, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {criterion}: {detail}")


def subset_score(weights, intercept, kept):
    """Score over an explicit set of kept features, summed in ascending id order."""
    total = 0.0
    for j in sorted(kept):
        total += weights.get(j, 0.0)
    return total + intercept


def is_ec_explanation(model, instance, E):
    """The three defining conditions of an evidence counterfactual, by enumeration."""
    active = set(instance.active)
    w, b, q = model.weights, model.intercept, model.threshold
    original = subset_score(w, b, active) > q
    if not set(E) <= active:
        return False
    if (subset_score(w, b, active - set(E)) > q) == original:
        return False
    E = sorted(E)
    for r in range(len(E)):
        for sub in itertools.combinations(E, r):
            if (subset_score(w, b, active - set(sub)) > q) != original:
                return False
    return True


def min_flip_size(model, instance):
    """Smallest number of removals that flips a positive prediction, or None."""
    active = sorted(instance.active)
    w, b, q = model.weights, model.intercept, model.threshold
    for r in range(1, len(active) + 1):
        for sub in itertools.combinations(active, r):
            if subset_score(w, b, set(active) - set(sub)) <= q:
                return r
    return None


def shapley_by_permutations(weights, quota):
    """Average swing of each player over all n! join orders."""
    players = sorted(weights)
    n = len(players)
    totals = {p: 0 for p in players}
    count = 0
    for order in itertools.permutations(players):
        joined = []
        before = int(0.0 > quota)
        for p in order:
            joined.append(p)
            after = int(sum(weights[x] for x in sorted(joined)) > quota)
            totals[p] += after - before
            before = after
        count += 1
    return {p: totals[p] / count for p in players}, count


@pytest.fixture
def two_feature_model():
    from sparse_explain import LinearModel
    return LinearModel({0: 2.0, 1: -1.0}, intercept=0.5, threshold=0.0, num_features=2)

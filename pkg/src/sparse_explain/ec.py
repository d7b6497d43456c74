"""Evidence counterfactual explanations.

An explanation of a positive prediction is a set ``E`` of the instance's
active features such that deleting all of ``E`` makes the model predict
negative, while deleting any proper subset of ``E`` does not.

Three searches are provided:

* :func:`explain_linear` removes features in evidence order and returns the
  shortest flipping prefix; for a linear model this is a minimum-size
  explanation.
* :func:`explain_complete` enumerates subsets by increasing size.
* :func:`explain_greedy` repeatedly removes the feature whose deletion lowers
  the score the most, then prunes anything that is not needed.

Negative predictions are not explained; all three return ``None`` for them.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Optional

from .errors import ResourceError
from .model import LinearModel, Prediction, SparseInstance, evidence, predict, score

DEFAULT_BUDGET = 10**7


class SearchMethod(str, enum.Enum):
    LINEAR_RANK = "linear_rank"
    COMPLETE = "complete"
    GREEDY = "greedy"


@dataclass(frozen=True)
class Explanation:
    instance_id: int
    features: frozenset[int]
    original_class: Prediction
    flipped_class: Prediction
    search_method: SearchMethod

    @property
    def size(self) -> int:
        return len(self.features)


def _without(instance: SparseInstance, removed) -> frozenset[int]:
    return frozenset(instance.active).difference(removed)


def _flips(model: LinearModel, instance: SparseInstance, removed) -> bool:
    return predict(model, instance, _without(instance, removed)) is Prediction.NEGATIVE


def _explanation(instance, removed, method) -> Explanation:
    return Explanation(instance.instance_id, frozenset(removed), Prediction.POSITIVE,
                       Prediction.NEGATIVE, method)


def explain_linear(model: LinearModel, instance: SparseInstance) -> Optional[Explanation]:
    if predict(model, instance) is not Prediction.POSITIVE:
        return None
    ranked = [j for j, _ in evidence(model, instance)]
    # Only removing positive evidence can lower the score, and along that
    # prefix the masked score is monotone (float summation is monotone in each
    # term), so the shortest flipping prefix can be found by bisection.
    n_pos = sum(1 for j in ranked if model.weight(j) > 0)
    if n_pos == 0 or not _flips(model, instance, ranked[:n_pos]):
        return None
    lo, hi = 1, n_pos
    while lo < hi:
        mid = (lo + hi) // 2
        if _flips(model, instance, ranked[:mid]):
            hi = mid
        else:
            lo = mid + 1
    return _explanation(instance, ranked[:lo], SearchMethod.LINEAR_RANK)


def complete_search_cost(num_active: int, max_size: int) -> int:
    """Number of subset evaluations a complete search up to ``max_size`` may need."""
    return sum(math.comb(num_active, s) for s in range(1, min(max_size, num_active) + 1))


def explain_complete(model: LinearModel, instance: SparseInstance, max_size: int,
                     budget: int = DEFAULT_BUDGET) -> Optional[Explanation]:
    """Smallest flipping subset, first in lexicographic order of feature ids."""
    cost = complete_search_cost(len(instance.active), max_size)
    if cost > budget:
        raise ResourceError(
            f"complete search over {len(instance.active)} features up to size {max_size} "
            f"needs {cost} evaluations, budget is {budget}")
    if predict(model, instance) is not Prediction.POSITIVE:
        return None
    for size in range(1, min(max_size, len(instance.active)) + 1):
        for subset in itertools.combinations(instance.active, size):
            if _flips(model, instance, subset):
                return _explanation(instance, subset, SearchMethod.COMPLETE)
    return None


def explain_greedy(model: LinearModel, instance: SparseInstance) -> Optional[Explanation]:
    if predict(model, instance) is not Prediction.POSITIVE:
        return None
    remaining = set(instance.active)
    removed: list[int] = []
    current = score(model, instance)
    while True:
        best = None
        for j in sorted(remaining):
            s = score(model, instance, remaining - {j})
            if best is None or s < best[0]:
                best = (s, j)
        if best is None or not best[0] < current:
            return None
        current, j = best
        remaining.discard(j)
        removed.append(j)
        if current <= model.threshold:
            break
    # Latest removals carry the least evidence; try re-adding those first.
    for j in reversed(list(removed)):
        trial = [f for f in removed if f != j]
        if _flips(model, instance, trial):
            removed = trial
    return _explanation(instance, removed, SearchMethod.GREEDY)

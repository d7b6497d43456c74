"""Shapley attributions for a linear model's positive prediction.

The active features of an instance play a weighted voting game: every feature
votes with its coefficient and a coalition wins when its votes exceed
``threshold - intercept``, i.e. exactly when the model restricted to the
coalition predicts positive. A feature's Shapley value is its average swing
over all orders in which the features could join.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional

import numpy as np

from .errors import ContractError, ResourceError
from .model import LinearModel, SparseInstance, _check_range

EXACT_LIMIT = 20
DEFAULT_SAMPLES = 10_000
# Bounds the (samples, players) block held in memory by approx_shapley.
_CHUNK_CELLS = 2_000_000


class ShapleyMethod(str, enum.Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class VotingGame:
    players: tuple[int, ...]
    weights: Mapping[int, float]
    effective_threshold: float

    @property
    def n(self) -> int:
        return len(self.players)

    def weight_array(self) -> np.ndarray:
        return np.array([self.weights[p] for p in self.players], dtype=float)

    def value(self, members) -> int:
        """Payoff ``v(S)``: 1 if the summed weight of ``members`` beats the quota."""
        return int(_coalition_sum(self.weights, members) > self.effective_threshold)


def _coalition_sum(weights, members) -> float:
    total = 0.0
    for p in sorted(members):
        total += weights[p]
    return total


@dataclass(frozen=True)
class Coalition:
    members: frozenset[int]
    weight_sum: float

    @classmethod
    def of(cls, game: VotingGame, members) -> "Coalition":
        members = frozenset(members)
        return cls(members, _coalition_sum(game.weights, members))


@dataclass(frozen=True)
class AttributionVector:
    instance_id: int
    values: Mapping[int, float]
    method: ShapleyMethod
    samples: int = 0
    seed: Optional[int] = None


def build_game(model: LinearModel, instance: SparseInstance) -> VotingGame:
    _check_range(model, instance)
    return VotingGame(
        players=instance.active,
        weights={j: model.weight(j) for j in instance.active},
        effective_threshold=model.threshold - model.intercept,
    )


def marginal_utility(game: VotingGame, coalition: Coalition, player: int) -> int:
    """``v(S + {player}) - v(S)``; -1 when a negative vote drops the coalition below quota."""
    if player in coalition.members:
        raise ContractError(f"player {player} already in coalition")
    if player not in game.weights:
        raise ContractError(f"{player} is not a player of this game")
    q = game.effective_threshold
    before = coalition.weight_sum > q
    after = _coalition_sum(game.weights, coalition.members | {player}) > q
    return int(after) - int(before)


def _subset_sums(w: np.ndarray) -> np.ndarray:
    # sums[mask] = sum of w[i] for bits i set in mask, built bit by bit.
    sums = np.zeros(1 << len(w))
    for i, wi in enumerate(w):
        half = 1 << i
        sums[half:2 * half] = sums[:half] + wi
    return sums


@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        half = 1 << i
        pc[half:2 * half] = pc[:half] + 1
    pc.flags.writeable = False
    return pc


def exact_shapley(game: VotingGame, exact_limit: int = EXACT_LIMIT,
                  instance_id: int = -1) -> AttributionVector:
    """Shapley values by summing marginals over every subset of the other players."""
    n = game.n
    if n > exact_limit:
        raise ResourceError(
            f"exact Shapley over {n} players exceeds exact_limit={exact_limit}; "
            "use approx_shapley")
    if n == 0:
        return AttributionVector(instance_id, {}, ShapleyMethod.EXACT)
    wins = (_subset_sums(game.weight_array()) > game.effective_threshold).astype(np.int8)
    pc = _popcounts(n)
    # P(S) = s!(n-s-1)!/n! = 1 / (n * C(n-1, s))
    coef = np.array([1.0 / (n * math.comb(n - 1, s)) for s in range(n)])
    values = {}
    for i, p in enumerate(game.players):
        # Axis 1 of the reshaped arrays is bit i: 0 = without player, 1 = with.
        v = wins.reshape(-1, 2, 1 << i)
        swing = (v[:, 1, :] - v[:, 0, :]).ravel()
        sizes = pc.reshape(-1, 2, 1 << i)[:, 0, :].ravel()
        by_size = np.bincount(sizes, weights=swing, minlength=n)
        values[p] = math.fsum(by_size * coef)
    return AttributionVector(instance_id, values, ShapleyMethod.EXACT)


def permutation_swings(game: VotingGame, samples: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Integer swing totals per player over ``samples`` random join orders.

    For each order the weights are accumulated left to right and each player is
    credited with the change in the win indicator at its insertion point. The
    totals over all players telescope to ``samples * (v(N) - v(empty))``.

    Sums are accumulated in join order, so a coalition whose exact sum equals
    the quota may be rounded to either side of it, unlike the fixed id order
    used by :func:`exact_shapley`.
    """
    if samples < 1:
        raise ContractError("samples must be >= 1")
    n = game.n
    totals = np.zeros(n, dtype=np.int64)
    if n == 0:
        return totals
    w = game.weight_array()
    q = game.effective_threshold
    v_empty = int(0.0 > q)
    chunk = max(1, _CHUNK_CELLS // n)
    done = 0
    while done < samples:
        rows = min(chunk, samples - done)
        # argsort of iid uniforms is a uniformly random permutation per row.
        perms = np.argsort(rng.random((rows, n)), axis=1)
        wins = (np.cumsum(w[perms], axis=1) > q).view(np.int8)
        swing = np.diff(wins, axis=1, prepend=np.int8(v_empty))
        hit = swing != 0
        totals += np.bincount(perms[hit], weights=swing[hit], minlength=n).astype(np.int64)
        done += rows
    return totals


def approx_shapley(game: VotingGame, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                   instance_id: int = -1,
                   rng: Optional[np.random.Generator] = None) -> AttributionVector:
    """Monte Carlo estimate from ``samples`` uniformly random player orders."""
    if rng is None:
        rng = np.random.default_rng(seed)
    totals = permutation_swings(game, samples, rng)
    values = {p: int(t) / samples for p, t in zip(game.players, totals)}
    return AttributionVector(instance_id, values, ShapleyMethod.MONTE_CARLO, samples, seed)


def instance_rng(base_seed: int, instance_id: int) -> np.random.Generator:
    """Per-instance generator keyed on ``(base_seed, instance_id)``, independent of scheduling."""
    return np.random.default_rng(np.random.SeedSequence([base_seed, instance_id]))


def explain_shapley(model: LinearModel, instance: SparseInstance, *,
                    samples: int = DEFAULT_SAMPLES, seed: int = 0,
                    exact_limit: int = EXACT_LIMIT) -> AttributionVector:
    """Exact values for small instances, otherwise a seeded Monte Carlo estimate."""
    game = build_game(model, instance)
    if game.n <= exact_limit:
        return exact_shapley(game, exact_limit, instance.instance_id)
    rng = instance_rng(seed, instance.instance_id)
    return approx_shapley(game, samples, seed, instance.instance_id, rng=rng)

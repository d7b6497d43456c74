"""Global feature rankings.

Instance-level EC or Shapley credits are summed per feature over the dataset
and divided by the grand total, so a feature's importance reflects both how
strongly it pushes a prediction and how many instances it occurs in. The two
baselines rank by raw coefficient and by coverage.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .ec import Explanation
from .errors import DegenerateNormalizationError
from .model import LinearModel, SparseDataset
from .shapley import AttributionVector


class RankMethod(str, enum.Enum):
    EC = "ec"
    SHAPLEY = "shapley"
    BETA = "beta"
    COVERAGE = "coverage"


class EcCredit(str, enum.Enum):
    MEMBERSHIP = "membership"
    INVERSE_SIZE = "inverse_size"


class RankEntry(NamedTuple):
    feature: int
    score: float
    raw: float


@dataclass(frozen=True)
class FeatureRanking:
    method: str
    entries: tuple[RankEntry, ...]
    raw_total: float

    def __len__(self):
        return len(self.entries)

    def features(self) -> list[int]:
        return [e.feature for e in self.entries]

    def top(self, k: int) -> list[int]:
        return [e.feature for e in self.entries[:k]]

    def positions(self) -> dict[int, int]:
        """1-based rank of every ranked feature."""
        return {e.feature: i for i, e in enumerate(self.entries, start=1)}


def _sorted_entries(entries: Iterable[RankEntry]) -> tuple[RankEntry, ...]:
    return tuple(sorted(entries, key=lambda e: (-e.score, e.feature)))


def _normalized(method: str, raw: Mapping[int, float]) -> FeatureRanking:
    total = math.fsum(raw.values())
    if not raw:
        return FeatureRanking(method, (), 0.0)
    if total == 0.0:
        raise DegenerateNormalizationError(
            f"{method} scores sum to zero; cannot normalize")
    return FeatureRanking(
        method, _sorted_entries(RankEntry(f, r / total, r) for f, r in raw.items()), total)


def aggregate_ec(explanations: Sequence[Explanation | None], num_features: int = 0,
                 credit: EcCredit | str = EcCredit.MEMBERSHIP) -> FeatureRanking:
    """Rank features by how often they appear in minimal explanations.

    With ``credit="inverse_size"`` each explanation spreads a single unit over
    its members instead of giving each member a full unit.
    """
    credit = EcCredit(credit)
    counts: dict[int, int] = defaultdict(int)
    shares: dict[int, list[float]] = defaultdict(list)
    for exp in explanations:
        if exp is None or not exp.features:
            continue
        for f in exp.features:
            counts[f] += 1
            shares[f].append(1.0 / exp.size)
    if credit is EcCredit.MEMBERSHIP:
        raw = {f: float(c) for f, c in counts.items()}
    else:
        raw = {f: math.fsum(v) for f, v in shares.items()}
    return _normalized(RankMethod.EC.value, raw)


def aggregate_shapley(attributions: Sequence[AttributionVector | None],
                      num_features: int = 0) -> FeatureRanking:
    """Sum per-instance Shapley values per feature and divide by the signed grand total.

    Features whose summed value is exactly zero are left out. Raises
    :class:`DegenerateNormalizationError` when every value is zero.
    """
    per_feature: dict[int, list[float]] = defaultdict(list)
    for att in attributions:
        if att is None:
            continue
        for f, v in att.values.items():
            if v != 0.0:
                per_feature[f].append(v)
    raw = {f: math.fsum(v) for f, v in per_feature.items()}
    raw = {f: r for f, r in raw.items() if r != 0.0}
    if not raw:
        raise DegenerateNormalizationError("all Shapley attributions are zero")
    return _normalized(RankMethod.SHAPLEY.value, raw)


def rank_by_beta(model: LinearModel) -> FeatureRanking:
    """Coefficients in descending order; scores are the raw weights, not normalized."""
    entries = _sorted_entries(RankEntry(f, w, w) for f, w in model.weights.items())
    return FeatureRanking(RankMethod.BETA.value, entries, math.fsum(model.weights.values()))


def beta_proportions(model: LinearModel) -> dict[int, float]:
    """Each weight as a share of the total positive weight."""
    pos = math.fsum(w for w in model.weights.values() if w > 0)
    if pos == 0.0:
        return {f: 0.0 for f in model.weights}
    return {f: w / pos for f, w in model.weights.items()}


def rank_by_coverage(dataset: SparseDataset) -> FeatureRanking:
    counts: dict[int, int] = defaultdict(int)
    for inst in dataset:
        for f in inst.active:
            counts[f] += 1
    return _normalized(RankMethod.COVERAGE.value, {f: float(c) for f, c in counts.items()})

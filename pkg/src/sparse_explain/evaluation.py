"""Explanation curves, rank correlations and synthetic benchmark data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import optimize, sparse
from scipy.stats import rankdata

from .errors import ContractError, UndefinedCorrelationError
from .model import LinearModel, SparseDataset, SparseInstance
from .ranking import FeatureRanking

MISSING_RANK_POLICY = "absent features share the averaged rank len(r2)+1"


@dataclass(frozen=True)
class ExplanationCurve:
    method: str
    points: tuple[tuple[int, int], ...]
    baseline_positive_count: int

    @property
    def ks(self) -> list[int]:
        return [k for k, _ in self.points]

    @property
    def explained(self) -> list[int]:
        return [e for _, e in self.points]

    def fractions(self) -> list[float]:
        b = self.baseline_positive_count
        return [e / b if b else 0.0 for e in self.explained]


@dataclass(frozen=True)
class CorrelationReport:
    method_pair: tuple[str, str]
    top_k: int
    rho: float
    missing_rank_policy: str = MISSING_RANK_POLICY


def default_k_grid(num_features: int) -> list[int]:
    """1, 2, 5, 10, 20, 50, ... capped by and always ending at ``num_features``."""
    ks = []
    decade = 1
    while decade <= num_features:
        for step in (1, 2, 5):
            k = step * decade
            if k < num_features:
                ks.append(k)
        decade *= 10
    ks.append(num_features)
    return ks


def ranking_order(ranking: FeatureRanking, num_features: int) -> np.ndarray:
    """Every feature id in curve order.

    Features the ranking leaves out count as score 0: they come after the
    positively scored entries and before the negative ones, by ascending id.
    """
    scores = np.zeros(num_features)
    listed = np.zeros(num_features, dtype=bool)
    for e in ranking.entries:
        if e.feature < num_features:
            scores[e.feature] = e.score
            listed[e.feature] = True
    pos = [e.feature for e in ranking.entries if e.score > 0 and e.feature < num_features]
    neg = [e.feature for e in ranking.entries if e.score <= 0 and e.feature < num_features]
    zero_tail = [f for f in neg if scores[f] == 0]
    neg = [f for f in neg if scores[f] != 0]
    unlisted = np.flatnonzero(~listed)
    # Listed zero-score entries merge with the unlisted ones in id order.
    zeros = np.sort(np.concatenate([np.asarray(zero_tail, dtype=np.int64), unlisted]))
    return np.concatenate([np.asarray(pos, dtype=np.int64), zeros,
                           np.asarray(neg, dtype=np.int64)])


def explanation_curve(ranking: FeatureRanking, model: LinearModel, dataset: SparseDataset,
                      ks: Optional[Sequence[int]] = None, *,
                      X: Optional[sparse.csr_matrix] = None) -> ExplanationCurve:
    """Count full-model positives that stay positive when only the top-k features are kept.

    Features the ranking does not list are slotted in as zero scores (see
    :func:`ranking_order`), so at ``k = num_features`` every feature is kept
    and the count equals the number of full-model positives.
    """
    m = max(model.num_features, dataset.num_features)
    if ks is None:
        ks = default_k_grid(m)
    ks = list(ks)
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ContractError(f"ks must be strictly increasing, got {ks}")
    if ks and (ks[0] < 0 or ks[-1] > m):
        raise ContractError(f"ks must lie in [0, {m}]")
    if X is None:
        X = dataset.to_csr(m)
    beta = np.zeros(m)
    beta[:model.num_features] = model.weight_vector
    full = X @ beta + model.intercept
    positive = full > model.threshold
    Xpos = X[positive]
    order = ranking_order(ranking, m)
    points = []
    for k in ks:
        masked = np.zeros(m)
        keep = order[:k]
        masked[keep] = beta[keep]
        s = Xpos @ masked + model.intercept
        points.append((k, int(np.count_nonzero(s > model.threshold))))
    return ExplanationCurve(ranking.method, tuple(points), int(np.count_nonzero(positive)))


def spearman_topk(r1: FeatureRanking, r2: FeatureRanking, top_k: int) -> CorrelationReport:
    """Spearman correlation of ``r1``'s top features against their positions in ``r2``.

    Features absent from ``r2`` all get rank ``len(r2) + 1``; average-rank tie
    handling then shares that rank among them. The result is asymmetric in
    ``r1`` and ``r2``.
    """
    if top_k < 2:
        raise ContractError("top_k must be >= 2")
    head = r1.top(top_k)
    pos2 = r2.positions()
    overlap = sum(1 for f in head if f in pos2)
    if overlap < 2:
        raise UndefinedCorrelationError(
            f"only {overlap} of the top {len(head)} {r1.method} features are ranked by {r2.method}")
    sentinel = len(r2) + 1
    x = rankdata(np.arange(1, len(head) + 1))
    y = rankdata([pos2.get(f, sentinel) for f in head])
    rho = _pearson(x, y)
    if rho is None:
        raise UndefinedCorrelationError("constant ranks, correlation undefined")
    return CorrelationReport((r1.method, r2.method), top_k, rho)


def _pearson(x: np.ndarray, y: np.ndarray) -> Optional[float]:
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        return None
    return float(min(1.0, max(-1.0, float(dx @ dy) / denom)))


@dataclass(frozen=True)
class CurveReportRow:
    k: int
    explained: dict[str, int]
    ratio_to_beta: dict[str, float]
    doubled: dict[str, bool]


@dataclass(frozen=True)
class CurveReport:
    baseline: str
    rows: tuple[CurveReportRow, ...]

    def ratios(self, method: str) -> list[float]:
        return [row.ratio_to_beta[method] for row in self.rows]

    def median_ratio(self, method: str) -> float:
        """Ratio at the median grid point (lower median for an even grid)."""
        r = self.ratios(method)
        return r[(len(r) - 1) // 2]


def curve_report(curves: Sequence[ExplanationCurve], baseline: str = "beta") -> CurveReport:
    """Per-k ratio of each curve to the baseline curve, flagging ratios of 2 or more."""
    by_method = {c.method: c for c in curves}
    if baseline not in by_method:
        raise ContractError(f"no {baseline!r} curve to compare against")
    ks = by_method[baseline].ks
    for c in curves:
        if c.ks != ks:
            raise ContractError(f"curve {c.method} has ks {c.ks}, expected {ks}")
    base = by_method[baseline].explained
    rows = []
    for i, k in enumerate(ks):
        explained = {c.method: c.explained[i] for c in curves}
        ratios = {}
        for method, e in explained.items():
            if base[i]:
                ratios[method] = e / base[i]
            else:
                ratios[method] = math.inf if e else 1.0
        doubled = {m: m != baseline and r >= 2.0 for m, r in ratios.items()}
        rows.append(CurveReportRow(k, explained, ratios, doubled))
    return CurveReport(baseline, tuple(rows))


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of the synthetic sparse benchmark.

    Feature ``j`` occurs with probability proportional to
    ``(j + 1) ** -coverage_exponent`` (capped at ``max_coverage``), scaled so an
    instance has ``mean_active`` features on average. Every feature gets a
    small Gaussian noise weight; a ``signal_fraction`` of features, spread over
    the whole vocabulary, gets a moderate positive weight instead; and a
    ``rare_fraction`` of the rarest half of the vocabulary gets the largest
    weights of all, so the top coefficients sit on features that hardly ever
    occur. With the defaults any single signal or rare feature is enough to
    make an instance positive. Setting ``intercept=None`` instead calibrates
    it so that ``positive_rate`` of the instances are positive.
    """

    num_instances: int = 10_000
    num_features: int = 5_000
    coverage_exponent: float = 1.0
    mean_active: float = 30.0
    max_coverage: float = 0.5
    noise_scale: float = 0.02
    signal_fraction: float = 0.02
    signal_weight_low: float = 1.0
    signal_weight_high: float = 2.5
    rare_fraction: float = 0.05
    rare_weight_low: float = 3.0
    rare_weight_high: float = 6.0
    intercept: Optional[float] = -0.5
    positive_rate: float = 0.3
    threshold: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.num_instances < 1 or self.num_features < 1:
            raise ContractError("num_instances and num_features must be positive")
        if self.coverage_exponent < 0:
            raise ContractError("coverage_exponent must be >= 0")
        if not 0 < self.max_coverage <= 1:
            raise ContractError("max_coverage must be in (0, 1]")
        if not 0 < self.mean_active <= self.num_features * self.max_coverage:
            raise ContractError("mean_active must be in (0, num_features * max_coverage]")
        for name in ("signal_fraction", "rare_fraction"):
            if not 0 <= getattr(self, name) <= 1:
                raise ContractError(f"{name} must be in [0, 1]")
        if (self.noise_scale < 0 or self.signal_weight_high < self.signal_weight_low
                or self.rare_weight_high < self.rare_weight_low):
            raise ContractError("invalid weight distribution parameters")
        if not 0 < self.positive_rate < 1:
            raise ContractError("positive_rate must be in (0, 1)")
        if self.seed < 0:
            raise ContractError("seed must be non-negative")


def coverage_probabilities(config: SynthConfig) -> np.ndarray:
    base = (np.arange(config.num_features) + 1.0) ** -config.coverage_exponent
    cap = config.max_coverage

    def excess(c):
        return np.minimum(cap, c * base).sum() - config.mean_active

    hi = 1.0
    while excess(hi) < 0:
        hi *= 2.0
    c = optimize.brentq(excess, 0.0, hi, xtol=1e-12)
    return np.minimum(cap, c * base)


def generate_synthetic(config: SynthConfig) -> tuple[LinearModel, SparseDataset]:
    rng = np.random.default_rng(config.seed)
    n, m = config.num_instances, config.num_features
    p = coverage_probabilities(config)

    rows = [[] for _ in range(n)]
    counts = rng.binomial(n, p)
    for j in range(m):
        for i in rng.choice(n, size=counts[j], replace=False):
            rows[i].append(j)

    weights = rng.normal(0.0, config.noise_scale, size=m)
    n_signal = int(round(config.signal_fraction * m))
    if n_signal:
        signal = rng.choice(m, size=n_signal, replace=False)
        weights[signal] = rng.uniform(config.signal_weight_low, config.signal_weight_high,
                                      size=n_signal)
    tail = np.arange(m // 2, m)
    n_rare = min(int(round(config.rare_fraction * m)), len(tail))
    if n_rare:
        rare = rng.choice(tail, size=n_rare, replace=False)
        weights[rare] = rng.uniform(config.rare_weight_low, config.rare_weight_high,
                                    size=n_rare)

    dataset = SparseDataset(tuple(SparseInstance(i, tuple(r)) for i, r in enumerate(rows)), m)
    intercept = config.intercept
    if intercept is None:
        raw = np.sort(dataset.to_csr(m) @ weights)
        # Midpoint between neighbouring order statistics keeps scores off the threshold.
        cut = min(max(int(round((1 - config.positive_rate) * n)), 1), n - 1)
        intercept = config.threshold - 0.5 * (raw[cut - 1] + raw[cut])
    model = LinearModel({j: float(w) for j, w in enumerate(weights)}, float(intercept),
                        config.threshold, m)
    return model, dataset

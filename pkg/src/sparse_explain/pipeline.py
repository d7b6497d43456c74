"""Dataset-level runs: explain every instance, then rank.

Instances are split into contiguous chunks and fanned out with joblib; the
results come back in instance order, and per-instance seeds are derived from
``(seed, instance_id)``, so output does not depend on ``n_jobs``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from joblib import Parallel, delayed

from . import ec, shapley
from .model import LinearModel, Prediction, SparseDataset, predict
from .ranking import (EcCredit, FeatureRanking, RankMethod, aggregate_ec,
                      aggregate_shapley, rank_by_beta, rank_by_coverage)


@dataclass(frozen=True)
class ExplainSettings:
    ec_search: str = "linear"
    max_size: int = 12
    budget: int = ec.DEFAULT_BUDGET
    samples: int = shapley.DEFAULT_SAMPLES
    seed: int = 0
    exact_limit: int = shapley.EXACT_LIMIT
    ec_credit: EcCredit = EcCredit.MEMBERSHIP


def _explain_ec_one(model, inst, settings):
    if settings.ec_search == "linear":
        return ec.explain_linear(model, inst)
    if settings.ec_search == "greedy":
        return ec.explain_greedy(model, inst)
    if settings.ec_search == "complete":
        return ec.explain_complete(model, inst, settings.max_size, settings.budget)
    raise ValueError(f"unknown EC search {settings.ec_search!r}")


def _explain_shapley_one(model, inst, settings):
    if predict(model, inst) is not Prediction.POSITIVE:
        return None
    return shapley.explain_shapley(model, inst, samples=settings.samples,
                                   seed=settings.seed, exact_limit=settings.exact_limit)


def _run_chunk(fn, model, instances, settings):
    return [fn(model, inst, settings) for inst in instances]


def _map_instances(fn, model, dataset, settings, n_jobs):
    instances = list(dataset.instances)
    if n_jobs <= 1 or len(instances) < 2:
        return _run_chunk(fn, model, instances, settings)
    n_chunks = min(len(instances), 4 * n_jobs)
    size = -(-len(instances) // n_chunks)
    chunks = [instances[i:i + size] for i in range(0, len(instances), size)]
    parts = Parallel(n_jobs=n_jobs)(
        delayed(_run_chunk)(fn, model, c, settings) for c in chunks)
    return [r for part in parts for r in part]


def explain_dataset_ec(model: LinearModel, dataset: SparseDataset,
                       settings: ExplainSettings = ExplainSettings(),
                       n_jobs: int = 1) -> list[Optional[ec.Explanation]]:
    """One entry per instance, ``None`` where the prediction is negative or unexplainable."""
    return _map_instances(_explain_ec_one, model, dataset, settings, n_jobs)


def explain_dataset_shapley(model: LinearModel, dataset: SparseDataset,
                            settings: ExplainSettings = ExplainSettings(),
                            n_jobs: int = 1) -> list[Optional[shapley.AttributionVector]]:
    """One entry per instance, ``None`` for negative predictions."""
    return _map_instances(_explain_shapley_one, model, dataset, settings, n_jobs)


def compute_ranking(method: RankMethod | str, model: LinearModel, dataset: SparseDataset,
                    settings: ExplainSettings = ExplainSettings(),
                    n_jobs: int = 1) -> FeatureRanking:
    method = RankMethod(method)
    m = max(model.num_features, dataset.num_features)
    if method is RankMethod.EC:
        return aggregate_ec(explain_dataset_ec(model, dataset, settings, n_jobs), m,
                            settings.ec_credit)
    if method is RankMethod.SHAPLEY:
        return aggregate_shapley(explain_dataset_shapley(model, dataset, settings, n_jobs), m)
    if method is RankMethod.BETA:
        return rank_by_beta(model)
    return rank_by_coverage(dataset)

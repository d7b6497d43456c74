"""Linear model over sparse binary features, and the data it scores.

An instance is just the sorted tuple of feature ids that are switched on.
Scores are summed in ascending feature-id order starting from ``0.0`` and the
intercept is added last, so masked and vectorised scoring (``X @ beta``) agree
bit for bit with :func:`score`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import AbstractSet, Iterable, Mapping, Optional

import numpy as np
from scipy import sparse

from .errors import ContractError, FeatureRangeError


class Prediction(enum.IntEnum):
    NEGATIVE = 0
    POSITIVE = 1


@dataclass(frozen=True)
class LinearModel:
    """Fixed linear classifier: positive iff ``intercept + sum(beta) > threshold``.

    Features missing from ``weights`` have weight zero.
    """

    weights: Mapping[int, float]
    intercept: float = 0.0
    threshold: float = 0.0
    num_features: int = 0

    def __post_init__(self):
        weights = {int(k): float(v) for k, v in self.weights.items()}
        object.__setattr__(self, "weights", weights)
        if not math.isfinite(self.intercept) or not math.isfinite(self.threshold):
            raise ContractError("intercept and threshold must be finite")
        top = max(weights, default=-1)
        num_features = self.num_features
        if num_features < top + 1:
            if num_features:
                raise FeatureRangeError(
                    f"weight for feature {top} but num_features={num_features}")
            num_features = top + 1
        object.__setattr__(self, "num_features", int(num_features))
        for k, v in weights.items():
            if k < 0:
                raise FeatureRangeError(f"negative feature id {k}")
            if not math.isfinite(v):
                raise ContractError(f"non-finite weight for feature {k}")

    def weight(self, feature: int) -> float:
        return self.weights.get(feature, 0.0)

    @cached_property
    def weight_vector(self) -> np.ndarray:
        """Dense ``(num_features,)`` array of coefficients."""
        beta = np.zeros(self.num_features)
        if self.weights:
            keys = np.fromiter(self.weights.keys(), dtype=np.int64)
            beta[keys] = np.fromiter(self.weights.values(), dtype=float)
        return beta

    def with_threshold(self, threshold: float) -> "LinearModel":
        return LinearModel(self.weights, self.intercept, threshold, self.num_features)


@dataclass(frozen=True)
class SparseInstance:
    instance_id: int
    active: tuple[int, ...]
    label: Optional[int] = None

    def __post_init__(self):
        active = tuple(int(j) for j in self.active)
        if any(b <= a for a, b in zip(active, active[1:])):
            raise ContractError(
                f"instance {self.instance_id}: active features must be strictly increasing")
        if active and active[0] < 0:
            raise FeatureRangeError(f"instance {self.instance_id}: negative feature id")
        object.__setattr__(self, "active", active)

    def __len__(self):
        return len(self.active)


@dataclass(frozen=True)
class SparseDataset:
    instances: tuple[SparseInstance, ...]
    num_features: int = 0

    def __post_init__(self):
        instances = tuple(self.instances)
        object.__setattr__(self, "instances", instances)
        ids = [inst.instance_id for inst in instances]
        if len(set(ids)) != len(ids):
            raise ContractError("instance ids must be unique")
        top = max((inst.active[-1] for inst in instances if inst.active), default=-1)
        if self.num_features < top + 1:
            object.__setattr__(self, "num_features", top + 1)

    def __len__(self):
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], num_features: int = 0,
                  labels: Optional[Iterable[Optional[int]]] = None) -> "SparseDataset":
        rows = [sorted(set(r)) for r in rows]
        labels = list(labels) if labels is not None else [None] * len(rows)
        return cls(tuple(SparseInstance(i, tuple(r), lab)
                         for i, (r, lab) in enumerate(zip(rows, labels))), num_features)

    def to_csr(self, num_features: Optional[int] = None) -> sparse.csr_matrix:
        m = max(self.num_features, num_features or 0)
        indptr = np.zeros(len(self.instances) + 1, dtype=np.int64)
        np.cumsum([len(inst.active) for inst in self.instances], out=indptr[1:])
        indices = np.fromiter(
            (j for inst in self.instances for j in inst.active), dtype=np.int64,
            count=int(indptr[-1]))
        data = np.ones(len(indices))
        return sparse.csr_matrix((data, indices, indptr), shape=(len(self.instances), m))


def _check_range(model: LinearModel, instance: SparseInstance) -> None:
    if instance.active and instance.active[-1] >= model.num_features:
        raise FeatureRangeError(
            f"instance {instance.instance_id} uses feature {instance.active[-1]} "
            f"but the model has {model.num_features} features")


def score(model: LinearModel, instance: SparseInstance,
          mask: Optional[AbstractSet[int]] = None) -> float:
    """Linear score of ``instance``, counting only active features in ``mask``.

    ``mask=None`` counts every active feature. Leaving a feature out of the mask
    is the same as deleting it from the instance.
    """
    _check_range(model, instance)
    w = model.weights
    total = 0.0
    if mask is None:
        for j in instance.active:
            total += w.get(j, 0.0)
    else:
        for j in instance.active:
            if j in mask:
                total += w.get(j, 0.0)
    return total + model.intercept


def predict(model: LinearModel, instance: SparseInstance,
            mask: Optional[AbstractSet[int]] = None) -> Prediction:
    if score(model, instance, mask) > model.threshold:
        return Prediction.POSITIVE
    return Prediction.NEGATIVE


def evidence(model: LinearModel, instance: SparseInstance) -> list[tuple[int, float]]:
    """Active features paired with their evidence ``beta_j * x_ij``, largest first.

    Ties go to the smaller feature id.
    """
    _check_range(model, instance)
    pairs = [(j, model.weight(j)) for j in instance.active]
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return pairs

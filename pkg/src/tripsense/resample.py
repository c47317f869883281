"""SMOTE oversampling of the minority class.

Synthetic rows interpolate between a minority row and one of its k nearest
minority neighbours: x_i + u * (x_nn - x_i) with u ~ Uniform[0, 1). Original
rows are kept unchanged and first; synthetic rows are appended with trip ids
"synthetic-<n>". Deterministic for a fixed (dataset, params).
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset
from .errors import TooFewMinority
from .seeds import rng_for


@dataclass(frozen=True)
class SmoteParams:
    k_neighbors: int = 5
    seed: int = 42
    target_ratio: float = 1.0  # minority/majority after resampling
    standardize: bool = False  # z-score features for the neighbour search

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if not 0.0 < self.target_ratio <= 1.0:
            raise ValueError("target_ratio must be in (0, 1]")


def _neighbor_table(points: np.ndarray, k: int) -> np.ndarray:
    """Row i holds the indices of the k nearest other rows (ties by index)."""
    m = len(points)
    table = np.empty((m, k), dtype=np.int64)
    for i in range(m):
        dists = np.linalg.norm(points - points[i], axis=1)
        dists[i] = np.inf
        order = np.lexsort((np.arange(m), dists))
        table[i] = order[:k]
    return table


def smote(dataset: LabeledDataset, params: SmoteParams) -> LabeledDataset:
    """Append synthetic minority rows until the class ratio reaches target.

    The minority class is whichever label has fewer rows; a balanced input
    is returned unchanged. k_neighbors is clamped to minority_count - 1.
    """
    n0, n1 = dataset.class_counts()
    if n0 == n1:
        return dataset
    minority_label = 1 if n1 < n0 else 0
    minority_count = min(n0, n1)
    majority_count = max(n0, n1)
    if minority_count < 2:
        raise TooFewMinority(f"minority class has {minority_count} sample(s), need >= 2")

    target = math.floor(params.target_ratio * majority_count)
    n_synthetic = target - minority_count
    if n_synthetic <= 0:
        return dataset

    minority_idx = np.flatnonzero(dataset.labels == minority_label)
    X_min = dataset.features[minority_idx]
    if params.standardize:
        means = dataset.features.mean(axis=0)
        stds = dataset.features.std(axis=0)
        search_space = (X_min - means) / np.where(stds == 0.0, 1.0, stds)
    else:
        search_space = X_min

    k = min(params.k_neighbors, minority_count - 1)
    neighbors = _neighbor_table(search_space, k)

    rng = rng_for(params.seed)
    synthetic = np.empty((n_synthetic, dataset.n_features))
    for s in range(n_synthetic):
        i = s % minority_count
        nn = neighbors[i, int(rng.integers(0, k))]
        u = rng.random()
        synthetic[s] = X_min[i] + u * (X_min[nn] - X_min[i])

    return LabeledDataset(
        features=np.vstack([dataset.features, synthetic]),
        labels=np.concatenate(
            [dataset.labels, np.full(n_synthetic, minority_label, dtype=np.int64)]
        ),
        feature_names=dataset.feature_names,
        trip_ids=dataset.trip_ids + tuple(f"synthetic-{s}" for s in range(n_synthetic)),
    )

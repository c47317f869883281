"""Random forest of CART trees with bootstrap sampling.

Tree b draws its bootstrap rows from a generator seeded by (seed + b); each
node evaluates a random feature subset seeded by (tree seed, node sequence
number), so serial and parallel fits produce identical forests.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyData
from ..seeds import rng_for
from .tree import DecisionTreeModel, TreeParams, fit_decision_tree, prepare_matrix


@dataclass(frozen=True)
class RandomForestParams:
    n_trees: int = 100
    tree: TreeParams = TreeParams()
    features_per_split: int | None = None  # default: floor(sqrt(width))
    bootstrap: bool = True
    seed: int = 42

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ValueError("features_per_split must be >= 1")


@dataclass
class RandomForestModel:
    trees: list[DecisionTreeModel]
    params: RandomForestParams
    n_features_in: int
    feature_names: tuple[str, ...] = ()
    feature_indices: tuple[int, ...] | None = None

    name = "random_forest"

    def predict_scores(self, X) -> np.ndarray:
        X = prepare_matrix(X, self.n_features_in, self.feature_indices)
        scores = np.zeros(X.shape[0])
        for tree in self.trees:
            scores += tree.predict_scores(X)
        return scores / len(self.trees)

    def predict_classes(self, X) -> np.ndarray:
        return (self.predict_scores(X) >= 0.5).astype(np.int64)

    def feature_importances(self) -> np.ndarray:
        """Total impurity decrease across trees, normalized to sum 1.

        All-zero (no split anywhere used a feature) stays all-zero.
        """
        totals = np.zeros(self.n_features_in)
        for tree in self.trees:
            totals += tree.feature_importances()
        total = totals.sum()
        return totals / total if total > 0 else totals


def _fit_one_tree(b, X, y, params, width):
    n = X.shape[0]
    tree_seed = params.seed + b
    if params.bootstrap:
        rows = rng_for(tree_seed).integers(0, n, size=n)
        Xb, yb = X[rows], y[rows]
    else:
        Xb, yb = X, y
    m = params.features_per_split or max(1, math.isqrt(width))
    m = min(m, width)

    if m >= width:
        sampler = None
    else:
        def sampler(node_seq, _seed=tree_seed, _m=m, _width=width):
            picked = rng_for(_seed, node_seq).choice(_width, size=_m, replace=False)
            return np.sort(picked)

    return fit_decision_tree(Xb, yb, params.tree, _feature_sampler=sampler)


def fit_random_forest(
    X,
    y,
    params: RandomForestParams,
    feature_names=(),
    feature_indices=None,
    threads: int = 1,
) -> RandomForestModel:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise EmptyData("cannot fit a forest on zero rows")
    width = X.shape[1]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(
                pool.map(lambda b: _fit_one_tree(b, X, y, params, width), range(params.n_trees))
            )
    else:
        trees = [_fit_one_tree(b, X, y, params, width) for b in range(params.n_trees)]
    return RandomForestModel(
        trees=trees,
        params=params,
        n_features_in=width,
        feature_names=tuple(feature_names),
        feature_indices=tuple(feature_indices) if feature_indices is not None else None,
    )

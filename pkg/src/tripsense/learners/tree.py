"""CART decision tree with greedy Gini splitting.

Split search: candidate thresholds are midpoints between consecutive
distinct sorted values of each feature; the split maximizing the Gini
impurity decrease wins, with ties broken by lower feature index, then lower
threshold. Routing sends x[feature] <= threshold to the left child.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyData, WidthMismatch


@dataclass(frozen=True)
class TreeParams:
    max_depth: int = 5
    min_samples_split: int = 10
    min_samples_leaf: int = 5
    seed: int = 42
    criterion: str = "gini"

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.criterion not in ("gini", "entropy"):
            raise ValueError("criterion must be 'gini' or 'entropy'")


def gini(class_counts: tuple[int, int]) -> float:
    """Gini impurity 1 - p0^2 - p1^2 of a two-class count pair."""
    n0, n1 = class_counts
    n = n0 + n1
    if n < 1:
        raise ValueError("gini needs at least one sample")
    p0 = n0 / n
    p1 = n1 / n
    return 1.0 - p0 * p0 - p1 * p1


def entropy(class_counts: tuple[int, int]) -> float:
    """Shannon entropy of a two-class count pair, in bits."""
    n0, n1 = class_counts
    n = n0 + n1
    if n < 1:
        raise ValueError("entropy needs at least one sample")
    result = 0.0
    for c in (n0, n1):
        if c:
            p = c / n
            result -= p * math.log2(p)
    return result


_IMPURITY = {"gini": gini, "entropy": entropy}


@dataclass
class TreeNode:
    counts: tuple[int, int]
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def n_samples(self) -> int:
        return self.counts[0] + self.counts[1]

    @property
    def score(self) -> float:
        return self.counts[1] / self.n_samples


def best_split(X, y, params: TreeParams, feature_indices=None):
    """Exhaustive best (feature, threshold, gain) at one node, or None.

    Splits leaving a child below min_samples_leaf are not candidates.
    Returns None when no candidate has positive gain.
    """
    n = len(y)
    counts = (int(n - y.sum()), int(y.sum()))
    impurity = _IMPURITY[params.criterion]
    parent_impurity = impurity(counts)
    if feature_indices is None:
        feature_indices = range(X.shape[1])

    best = None  # (gain, feature, threshold)
    for f in feature_indices:
        column = X[:, f]
        order = np.argsort(column, kind="stable")
        xs = column[order]
        cum_pos = np.cumsum(y[order])
        for i in range(n - 1):
            if xs[i] == xs[i + 1]:
                continue
            n_left = i + 1
            n_right = n - n_left
            if n_left < params.min_samples_leaf or n_right < params.min_samples_leaf:
                continue
            c1_left = int(cum_pos[i])
            c0_left = n_left - c1_left
            c1_right = counts[1] - c1_left
            c0_right = counts[0] - c0_left
            gain = (
                parent_impurity
                - (n_left / n) * impurity((c0_left, c1_left))
                - (n_right / n) * impurity((c0_right, c1_right))
            )
            if best is None or gain > best[0]:
                threshold = (xs[i] + xs[i + 1]) / 2.0
                best = (gain, f, threshold)
    if best is None or best[0] <= 0.0:
        return None
    return best


def _grow(X, y, depth, params, sampler, seq_counter):
    node_seq = seq_counter[0]
    seq_counter[0] += 1
    n = len(y)
    n1 = int(y.sum())
    counts = (n - n1, n1)
    if (
        depth >= params.max_depth
        or n < params.min_samples_split
        or counts[0] == 0
        or counts[1] == 0
    ):
        return TreeNode(counts=counts)

    candidates = sampler(node_seq) if sampler is not None else None
    found = best_split(X, y, params, candidates)
    if found is None:
        return TreeNode(counts=counts)
    _, feature, threshold = found
    feature = int(feature)
    threshold = float(threshold)
    mask = X[:, feature] <= threshold
    left = _grow(X[mask], y[mask], depth + 1, params, sampler, seq_counter)
    right = _grow(X[~mask], y[~mask], depth + 1, params, sampler, seq_counter)
    return TreeNode(counts=counts, feature=feature, threshold=threshold, left=left, right=right)


@dataclass
class DecisionTreeModel:
    """Fitted CART tree. Prediction score is the leaf positive fraction."""

    root: TreeNode
    n_features_in: int
    params: TreeParams
    feature_names: tuple[str, ...] = ()
    feature_indices: tuple[int, ...] | None = None

    name = "decision_tree"

    def _route(self, x) -> TreeNode:
        node = self.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node

    def predict_scores(self, X) -> np.ndarray:
        X = prepare_matrix(X, self.n_features_in, self.feature_indices)
        return np.array([self._route(row).score for row in X])

    def predict_classes(self, X) -> np.ndarray:
        return (self.predict_scores(X) >= 0.5).astype(np.int64)

    def depth(self) -> int:
        def walk(node):
            if node.is_leaf:
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)

    def iter_nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)

    def feature_importances(self) -> np.ndarray:
        """Per-feature sum of impurity decrease weighted by node fraction."""
        importances = np.zeros(self.n_features_in)
        total = self.root.n_samples

        def walk(node):
            if node.is_leaf:
                return
            n = node.n_samples
            decrease = (
                gini(node.counts)
                - (node.left.n_samples / n) * gini(node.left.counts)
                - (node.right.n_samples / n) * gini(node.right.counts)
            )
            importances[node.feature] += (n / total) * decrease
            walk(node.left)
            walk(node.right)

        walk(self.root)
        return importances


def prepare_matrix(X, n_features_in: int, feature_indices) -> np.ndarray:
    """Align a prediction matrix with the columns a model was trained on.

    Models fitted on a column subset carry the subset's canonical indices;
    full-width inputs are sliced down, already-sliced inputs pass through.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] == n_features_in:
        return X
    if feature_indices is not None and X.shape[1] > max(feature_indices):
        return X[:, list(feature_indices)]
    raise WidthMismatch(
        f"model expects {n_features_in} features, input has {X.shape[1]}"
    )


def fit_decision_tree(
    X,
    y,
    params: TreeParams,
    feature_names=(),
    feature_indices=None,
    _feature_sampler=None,
) -> DecisionTreeModel:
    """Grow a CART tree on a feature matrix and binary label vector."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise EmptyData("cannot fit a tree on zero rows")
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y disagree on row count")
    root = _grow(X, y, 0, params, _feature_sampler, [0])
    return DecisionTreeModel(
        root=root,
        n_features_in=X.shape[1],
        params=params,
        feature_names=tuple(feature_names),
        feature_indices=tuple(feature_indices) if feature_indices is not None else None,
    )


def predict_tree(model: DecisionTreeModel, x) -> tuple[int, float]:
    """Class and score for one feature vector."""
    score = float(model.predict_scores(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])
    return (1 if score >= 0.5 else 0), score

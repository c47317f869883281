"""Five feature-selection methods over a labeled dataset.

K-Best and Percentile rank by one-way ANOVA F; PCA ranks original features
by loading magnitude weighted by explained variance; random-forest
importance ranks by accumulated Gini impurity decrease; RFECV eliminates
features one at a time under a single CART tree and keeps the smallest
subset with the best cross-validated positive-class F1.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset
from .errors import DegenerateMatrix, SingleClass, TooFewSamples
from .evaluate import classification_metrics, confusion_from_predictions
from .learners import RandomForestParams, TreeParams, fit_decision_tree, fit_random_forest
from .seeds import rng_for


class SelectionMethod(enum.Enum):
    KBEST = "kbest"
    PERCENTILE = "percentile"
    PCA_LOADING = "pca_loading"
    RF_IMPORTANCE = "rf_importance"
    RFECV = "rfecv"


@dataclass(frozen=True)
class SelectionResult:
    method: SelectionMethod
    selected_indices: tuple[int, ...]
    scores: tuple[float, ...] | None  # per-feature, None for RFECV

    def __post_init__(self):
        if not self.selected_indices:
            raise ValueError("selection must keep at least one feature")
        if len(set(self.selected_indices)) != len(self.selected_indices):
            raise ValueError("selected indices must be unique")


def anova_f_scores(X, y) -> np.ndarray:
    """Per-column one-way ANOVA F statistic for a binary target.

    Columns constant everywhere score 0; columns constant within each class
    but differing between classes score +inf (perfect separation).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    classes = np.unique(y)
    if len(classes) < 2:
        raise SingleClass("ANOVA F needs both classes")
    n = len(y)
    k = len(classes)
    grand_mean = X.mean(axis=0)

    ssb = np.zeros(X.shape[1])
    ssw = np.zeros(X.shape[1])
    groups_constant = np.ones(X.shape[1], dtype=bool)
    for cls in classes:
        G = X[y == cls]
        mean_g = G.mean(axis=0)
        ssb += len(G) * (mean_g - grand_mean) ** 2
        ssw += np.sum((G - mean_g) ** 2, axis=0)
        groups_constant &= np.all(G == G[0], axis=0)

    overall_constant = np.all(X == X[0], axis=0)
    scores = np.zeros(X.shape[1])
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = (ssb / (k - 1)) / (ssw / (n - k))
    scores[groups_constant] = np.inf
    scores[overall_constant] = 0.0
    return scores


def _rank_descending(scores: np.ndarray) -> list[int]:
    # Highest score first; ties go to the lower feature index.
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def f_classif(dataset: LabeledDataset) -> np.ndarray:
    return anova_f_scores(dataset.features, dataset.labels)


def select_k_best(dataset: LabeledDataset, k: int) -> SelectionResult:
    width = dataset.n_features
    if not 1 <= k <= width:
        raise ValueError(f"k must be in [1, {width}]")
    scores = f_classif(dataset)
    ranked = _rank_descending(scores)
    return SelectionResult(
        method=SelectionMethod.KBEST,
        selected_indices=tuple(ranked[:k]),
        scores=tuple(float(s) for s in scores),
    )


def select_percentile(dataset: LabeledDataset, percentile: float) -> SelectionResult:
    if not 0.0 < percentile <= 100.0:
        raise ValueError("percentile must be in (0, 100]")
    width = dataset.n_features
    k = math.ceil(percentile / 100.0 * width)
    scores = f_classif(dataset)
    ranked = _rank_descending(scores)
    return SelectionResult(
        method=SelectionMethod.PERCENTILE,
        selected_indices=tuple(ranked[:k]),
        scores=tuple(float(s) for s in scores),
    )


def pca_loading_scores(X, n_components: int) -> np.ndarray:
    """Feature scores from PCA used as a ranking, not a projection.

    Each column is standardized (constant columns become zero vectors), the
    covariance of the standardized matrix is eigendecomposed, and a feature
    scores the maximum over the top components of |loading| weighted by the
    component's explained-variance ratio. Eigenvector signs follow the
    largest-magnitude-entry-positive convention.
    """
    X = np.asarray(X, dtype=np.float64)
    n, width = X.shape
    if n < 2:
        raise DegenerateMatrix("PCA needs at least 2 rows")
    if not 1 <= n_components <= min(n, width):
        raise ValueError("n_components out of range")

    means = X.mean(axis=0)
    stds = X.std(axis=0, ddof=1)
    Z = np.where(stds > 0.0, (X - means) / np.where(stds == 0.0, 1.0, stds), 0.0)
    cov = Z.T @ Z / (n - 1)

    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(-eigvals, kind="stable")
    eigvals = np.maximum(eigvals[order], 0.0)
    eigvecs = eigvecs[:, order]
    for c in range(eigvecs.shape[1]):
        pivot = np.argmax(np.abs(eigvecs[:, c]))
        if eigvecs[pivot, c] < 0.0:
            eigvecs[:, c] = -eigvecs[:, c]

    total = eigvals.sum()
    ratios = eigvals / total if total > 0.0 else np.zeros_like(eigvals)
    top = np.abs(eigvecs[:, :n_components]) * ratios[:n_components]
    return top.max(axis=1)


def pca_loading_select(dataset: LabeledDataset, n_components: int, k: int) -> SelectionResult:
    width = dataset.n_features
    if not 1 <= k <= width:
        raise ValueError(f"k must be in [1, {width}]")
    scores = pca_loading_scores(dataset.features, n_components)
    # Rank on scores snapped at 1e-12 relative so that symmetric inputs
    # (duplicated columns) tie exactly and resolve to the lower index,
    # independent of last-ulp noise in the eigenvectors.
    scale = float(np.max(np.abs(scores)))
    snapped = np.round(scores / scale, 12) * scale if scale > 0 else scores
    ranked = _rank_descending(snapped)
    return SelectionResult(
        method=SelectionMethod.PCA_LOADING,
        selected_indices=tuple(ranked[:k]),
        scores=tuple(float(s) for s in scores),
    )


def rf_importance_select(
    dataset: LabeledDataset, k: int, forest: RandomForestParams
) -> SelectionResult:
    width = dataset.n_features
    if not 1 <= k <= width:
        raise ValueError(f"k must be in [1, {width}]")
    model = fit_random_forest(dataset.features, dataset.labels, forest)
    importances = model.feature_importances()
    ranked = _rank_descending(importances)
    return SelectionResult(
        method=SelectionMethod.RF_IMPORTANCE,
        selected_indices=tuple(ranked[:k]),
        scores=tuple(float(s) for s in importances),
    )


def stratified_fold_indices(y, n_folds: int, seed: int) -> list[np.ndarray]:
    """Validation index arrays of a stratified k-fold, seeded per class."""
    y = np.asarray(y, dtype=np.int64)
    folds = [[] for _ in range(n_folds)]
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if len(idx) < n_folds:
            raise TooFewSamples(
                f"class {cls} has {len(idx)} member(s), fewer than {n_folds} folds"
            )
        shuffled = rng_for(seed, int(cls)).permutation(idx)
        for f in range(n_folds):
            folds[f].extend(shuffled[f::n_folds])
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def _cv_f1(X, y, subset, tree: TreeParams, folds) -> float:
    scores = []
    all_idx = np.arange(len(y))
    for val_idx in folds:
        train_idx = np.setdiff1d(all_idx, val_idx)
        model = fit_decision_tree(X[np.ix_(train_idx, subset)], y[train_idx], tree)
        pred = model.predict_classes(X[np.ix_(val_idx, subset)])
        cm = confusion_from_predictions(y[val_idx], pred)
        scores.append(classification_metrics(cm)[3])
    return float(np.mean(scores))


def rfecv(
    dataset: LabeledDataset, tree: TreeParams, n_folds: int, seed: int
) -> SelectionResult:
    """Recursive single-step elimination under cross-validated F1.

    From the full feature set, the feature with the lowest single-tree
    importance is dropped (ties drop the highest index) until one remains;
    the mean stratified-k-fold F1 of the positive class is recorded at every
    size and the smallest subset achieving the maximum is returned.
    """
    if n_folds < 2:
        raise ValueError("n_folds must be >= 2")
    X = dataset.features
    y = dataset.labels
    if len(np.unique(y)) < 2:
        raise SingleClass("RFECV needs both classes")
    folds = stratified_fold_indices(y, n_folds, seed)

    subset = list(range(dataset.n_features))
    best_score = -1.0
    best_subset: list[int] = subset[:]
    while True:
        score = _cv_f1(X, y, subset, tree, folds)
        # >= prefers the later (smaller) subset on ties
        if score >= best_score:
            best_score = score
            best_subset = subset[:]
        if len(subset) == 1:
            break
        model = fit_decision_tree(X[:, subset], y, tree)
        importances = model.feature_importances()
        worst_local = max(np.flatnonzero(importances == importances.min()))
        subset = subset[:worst_local] + subset[worst_local + 1 :]

    return SelectionResult(
        method=SelectionMethod.RFECV,
        selected_indices=tuple(sorted(best_subset)),
        scores=None,
    )


def selection_to_dict(result: SelectionResult, feature_names) -> dict:
    names = list(feature_names)
    payload = {
        "method": result.method.value,
        "selected": [names[i] for i in result.selected_indices],
    }
    if result.scores is not None:
        payload["scores"] = {names[i]: result.scores[i] for i in range(len(names))}
    return payload

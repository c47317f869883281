"""RBF-kernel SVM trained with kernelized Pegasos.

Stochastic subgradient descent on the hinge loss: at step t a random
training point i is drawn; if its margin under the current decision
function is below 1, its alpha count increments. The decision value is
(1 / (lambda * T)) * sum_j alpha_j y_j K(x_j, x), an uncalibrated real
score whose sign gives the class.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import SingleClass
from ..seeds import rng_for
from .linear import Scaler
from .tree import prepare_matrix

DEFAULT_GAMMA = 1.0 / 47.0


@dataclass(frozen=True)
class SvmParams:
    gamma: float = DEFAULT_GAMMA
    lam: float = 1e-3
    epochs: int = 200
    seed: int = 42
    standardize: bool = True

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def rbf_kernel(A, B, gamma: float) -> np.ndarray:
    """K[i, j] = exp(-gamma * ||A_i - B_j||^2)."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass
class SvmRbfModel:
    alpha: np.ndarray  # update counts per training point
    train_z: np.ndarray  # standardized training matrix
    train_pm: np.ndarray  # labels in {-1, +1}
    steps: int
    scaler: Scaler
    params: SvmParams
    n_features_in: int
    feature_names: tuple[str, ...] = ()
    feature_indices: tuple[int, ...] | None = None

    name = "svm_rbf"

    def predict_scores(self, X) -> np.ndarray:
        X = prepare_matrix(X, self.n_features_in, self.feature_indices)
        K = rbf_kernel(self.train_z, self.scaler.transform(X), self.params.gamma)
        return (self.alpha * self.train_pm) @ K / (self.params.lam * self.steps)

    def predict_classes(self, X) -> np.ndarray:
        return (self.predict_scores(X) >= 0.0).astype(np.int64)


def fit_svm_rbf(
    X,
    y,
    params: SvmParams,
    feature_names=(),
    feature_indices=None,
) -> SvmRbfModel:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise SingleClass("SVM needs both classes")

    scaler = Scaler.fit(X) if params.standardize else Scaler.identity(X.shape[1])
    Z = scaler.transform(X)
    pm = np.where(y == 1, 1.0, -1.0)
    n = Z.shape[0]
    K = rbf_kernel(Z, Z, params.gamma)

    rng = rng_for(params.seed)
    alpha = np.zeros(n)
    weighted = np.zeros(n)  # alpha * pm, kept incrementally
    steps = params.epochs * n
    for t in range(1, steps + 1):
        i = int(rng.integers(0, n))
        decision = weighted @ K[:, i] / (params.lam * t)
        if pm[i] * decision < 1.0:
            alpha[i] += 1.0
            weighted[i] += pm[i]
    return SvmRbfModel(
        alpha=alpha,
        train_z=Z,
        train_pm=pm,
        steps=steps,
        scaler=scaler,
        params=params,
        n_features_in=X.shape[1],
        feature_names=tuple(feature_names),
        feature_indices=tuple(feature_indices) if feature_indices is not None else None,
    )

"""Logistic regression fitted by full-batch gradient descent.

Minimizes mean negative log-likelihood plus l2 * ||w||^2 / 2 from zero
initialization. Features are standardized by default (population mean/std,
constant columns scaled by 1).
"""

from dataclasses import dataclass

import numpy as np

from ..errors import SingleClass
from .tree import prepare_matrix


@dataclass(frozen=True)
class LogRegParams:
    learning_rate: float = 0.1
    max_iters: int = 5000
    l2: float = 0.0
    tolerance: float = 1e-8  # on the gradient max-norm
    standardize: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")


@dataclass(frozen=True)
class Scaler:
    means: np.ndarray
    stds: np.ndarray

    @classmethod
    def fit(cls, X) -> "Scaler":
        means = X.mean(axis=0)
        stds = X.std(axis=0)
        stds = np.where(stds == 0.0, 1.0, stds)
        return cls(means=means, stds=stds)

    @classmethod
    def identity(cls, width: int) -> "Scaler":
        return cls(means=np.zeros(width), stds=np.ones(width))

    def transform(self, X) -> np.ndarray:
        return (X - self.means) / self.stds


def sigmoid(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss(Z, y, w, b, l2=0.0) -> float:
    """Mean NLL + l2 * ||w||^2 / 2, computed without overflow."""
    z = Z @ w + b
    nll = np.mean(np.maximum(z, 0.0) - y * z + np.log1p(np.exp(-np.abs(z))))
    return float(nll + 0.5 * l2 * np.dot(w, w))


def logistic_gradient(Z, y, w, b, l2=0.0):
    """(grad_w, grad_b) of logistic_loss."""
    residual = sigmoid(Z @ w + b) - y
    grad_w = Z.T @ residual / len(y) + l2 * w
    grad_b = float(residual.mean())
    return grad_w, grad_b


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    scaler: Scaler
    params: LogRegParams
    n_features_in: int
    loss_history: list[float]
    feature_names: tuple[str, ...] = ()
    feature_indices: tuple[int, ...] | None = None

    name = "logistic_regression"

    def predict_scores(self, X) -> np.ndarray:
        X = prepare_matrix(X, self.n_features_in, self.feature_indices)
        return sigmoid(self.scaler.transform(X) @ self.weights + self.bias)

    def predict_classes(self, X) -> np.ndarray:
        return (self.predict_scores(X) >= 0.5).astype(np.int64)


def fit_logistic_regression(
    X,
    y,
    params: LogRegParams,
    feature_names=(),
    feature_indices=None,
) -> LogisticModel:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64)
    if len(np.unique(y)) < 2:
        raise SingleClass("logistic regression needs both classes")

    scaler = Scaler.fit(X) if params.standardize else Scaler.identity(X.shape[1])
    Z = scaler.transform(X)
    w = np.zeros(X.shape[1])
    b = 0.0
    losses = [logistic_loss(Z, y, w, b, params.l2)]
    for _ in range(params.max_iters):
        grad_w, grad_b = logistic_gradient(Z, y, w, b, params.l2)
        if max(np.max(np.abs(grad_w)), abs(grad_b)) < params.tolerance:
            break
        w = w - params.learning_rate * grad_w
        b = b - params.learning_rate * grad_b
        losses.append(logistic_loss(Z, y, w, b, params.l2))
    return LogisticModel(
        weights=w,
        bias=b,
        scaler=scaler,
        params=params,
        n_features_in=X.shape[1],
        loss_history=losses,
        feature_names=tuple(feature_names),
        feature_indices=tuple(feature_indices) if feature_indices is not None else None,
    )

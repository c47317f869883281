"""JSON persistence for fitted models.

Trees serialize as nested {feature, threshold, counts, left, right} objects
with {counts} leaves; the linear model as {weights, bias, scaler}; the
forest as an array of trees plus its params; the SVM as its alpha vector
plus stored support data. A top-level "model" key discriminates the type on
reload.
"""

import json

import numpy as np

from .forest import RandomForestModel, RandomForestParams
from .linear import LogisticModel, LogRegParams, Scaler
from .svm import SvmParams, SvmRbfModel
from .tree import DecisionTreeModel, TreeNode, TreeParams


def _node_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"counts": list(node.counts)}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "counts": list(node.counts),
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(data: dict) -> TreeNode:
    counts = (int(data["counts"][0]), int(data["counts"][1]))
    if "feature" not in data:
        return TreeNode(counts=counts)
    return TreeNode(
        counts=counts,
        feature=int(data["feature"]),
        threshold=float(data["threshold"]),
        left=_node_from_dict(data["left"]),
        right=_node_from_dict(data["right"]),
    )


def _common(model) -> dict:
    return {
        "feature_names": list(model.feature_names),
        "feature_indices": (
            list(model.feature_indices) if model.feature_indices is not None else None
        ),
        "n_features_in": model.n_features_in,
    }


def model_to_dict(model) -> dict:
    if isinstance(model, DecisionTreeModel):
        return {
            "model": model.name,
            "params": {
                "max_depth": model.params.max_depth,
                "min_samples_split": model.params.min_samples_split,
                "min_samples_leaf": model.params.min_samples_leaf,
                "seed": model.params.seed,
                "criterion": model.params.criterion,
            },
            "tree": _node_to_dict(model.root),
            **_common(model),
        }
    if isinstance(model, RandomForestModel):
        return {
            "model": model.name,
            "params": {
                "n_trees": model.params.n_trees,
                "features_per_split": model.params.features_per_split,
                "bootstrap": model.params.bootstrap,
                "seed": model.params.seed,
                "tree": {
                    "max_depth": model.params.tree.max_depth,
                    "min_samples_split": model.params.tree.min_samples_split,
                    "min_samples_leaf": model.params.tree.min_samples_leaf,
                    "seed": model.params.tree.seed,
                    "criterion": model.params.tree.criterion,
                },
            },
            "trees": [_node_to_dict(t.root) for t in model.trees],
            **_common(model),
        }
    if isinstance(model, LogisticModel):
        return {
            "model": model.name,
            "params": {
                "learning_rate": model.params.learning_rate,
                "max_iters": model.params.max_iters,
                "l2": model.params.l2,
                "tolerance": model.params.tolerance,
                "standardize": model.params.standardize,
            },
            "weights": model.weights.tolist(),
            "bias": model.bias,
            "scaler": {
                "means": model.scaler.means.tolist(),
                "stds": model.scaler.stds.tolist(),
            },
            **_common(model),
        }
    if isinstance(model, SvmRbfModel):
        return {
            "model": model.name,
            "params": {
                "gamma": model.params.gamma,
                "lam": model.params.lam,
                "epochs": model.params.epochs,
                "seed": model.params.seed,
                "standardize": model.params.standardize,
            },
            "alpha": model.alpha.tolist(),
            "support_z": model.train_z.tolist(),
            "support_pm": model.train_pm.tolist(),
            "steps": model.steps,
            "scaler": {
                "means": model.scaler.means.tolist(),
                "stds": model.scaler.stds.tolist(),
            },
            **_common(model),
        }
    raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def model_from_dict(data: dict):
    kind = data.get("model")
    names = tuple(data.get("feature_names", ()))
    indices = data.get("feature_indices")
    indices = tuple(indices) if indices is not None else None
    width = int(data["n_features_in"])

    if kind == "decision_tree":
        p = data["params"]
        return DecisionTreeModel(
            root=_node_from_dict(data["tree"]),
            n_features_in=width,
            params=TreeParams(**p),
            feature_names=names,
            feature_indices=indices,
        )
    if kind == "random_forest":
        p = data["params"]
        params = RandomForestParams(
            n_trees=p["n_trees"],
            tree=TreeParams(**p["tree"]),
            features_per_split=p["features_per_split"],
            bootstrap=p["bootstrap"],
            seed=p["seed"],
        )
        trees = [
            DecisionTreeModel(
                root=_node_from_dict(t),
                n_features_in=width,
                params=params.tree,
            )
            for t in data["trees"]
        ]
        return RandomForestModel(
            trees=trees,
            params=params,
            n_features_in=width,
            feature_names=names,
            feature_indices=indices,
        )
    if kind == "logistic_regression":
        scaler = Scaler(
            means=np.array(data["scaler"]["means"], dtype=np.float64),
            stds=np.array(data["scaler"]["stds"], dtype=np.float64),
        )
        return LogisticModel(
            weights=np.array(data["weights"], dtype=np.float64),
            bias=float(data["bias"]),
            scaler=scaler,
            params=LogRegParams(**data["params"]),
            n_features_in=width,
            loss_history=[],
            feature_names=names,
            feature_indices=indices,
        )
    if kind == "svm_rbf":
        scaler = Scaler(
            means=np.array(data["scaler"]["means"], dtype=np.float64),
            stds=np.array(data["scaler"]["stds"], dtype=np.float64),
        )
        return SvmRbfModel(
            alpha=np.array(data["alpha"], dtype=np.float64),
            train_z=np.array(data["support_z"], dtype=np.float64),
            train_pm=np.array(data["support_pm"], dtype=np.float64),
            steps=int(data["steps"]),
            scaler=scaler,
            params=SvmParams(**data["params"]),
            n_features_in=width,
            feature_names=names,
            feature_indices=indices,
        )
    raise ValueError(f"unknown model kind {kind!r}")


def model_to_json(model) -> str:
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n"


def model_from_json(text: str):
    return model_from_dict(json.loads(text))

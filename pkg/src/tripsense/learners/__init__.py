"""From-scratch classifiers: CART tree, random forest, logistic regression,
RBF-kernel SVM. Each model exposes predict_classes and a real-valued
predict_scores suitable for ROC ranking."""

from .forest import RandomForestModel, RandomForestParams, fit_random_forest
from .linear import (
    LogisticModel,
    LogRegParams,
    Scaler,
    fit_logistic_regression,
    logistic_gradient,
    logistic_loss,
    sigmoid,
)
from .serialize import model_from_dict, model_from_json, model_to_dict, model_to_json
from .svm import SvmParams, SvmRbfModel, fit_svm_rbf, rbf_kernel
from .tree import (
    DecisionTreeModel,
    TreeNode,
    TreeParams,
    best_split,
    fit_decision_tree,
    gini,
    predict_tree,
)

__all__ = [
    "DecisionTreeModel",
    "LogRegParams",
    "LogisticModel",
    "RandomForestModel",
    "RandomForestParams",
    "Scaler",
    "SvmParams",
    "SvmRbfModel",
    "TreeNode",
    "TreeParams",
    "best_split",
    "fit_decision_tree",
    "fit_logistic_regression",
    "fit_random_forest",
    "fit_svm_rbf",
    "gini",
    "logistic_gradient",
    "logistic_loss",
    "model_from_dict",
    "model_from_json",
    "model_to_dict",
    "model_to_json",
    "predict_tree",
    "rbf_kernel",
    "sigmoid",
]

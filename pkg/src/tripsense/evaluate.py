"""Stratified splitting, confusion-matrix metrics, ROC/AUC, and reports."""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import LabeledDataset
from .errors import SingleClass, TooFewSamples
from .seeds import rng_for


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion matrix cells must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class EvalReport:
    model_name: str
    confusion: ConfusionMatrix
    accuracy: float
    precision: float
    recall: float
    f1: float
    roc_points: tuple[tuple[float, float], ...]
    auc: float

    def to_dict(self) -> dict:
        return {
            "model": self.model_name,
            "confusion": self.confusion.to_dict(),
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auc": self.auc,
            "roc": [[fpr, tpr] for fpr, tpr in self.roc_points],
        }


def stratified_split(
    dataset: LabeledDataset, test_fraction: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Class-preserving train/test partition.

    Per class the test count is the nearest integer to test_fraction times
    the class size (half rounds up), clamped so both sides keep at least one
    member. Shuffles are seeded by (seed, class), so partitions are
    reproducible.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    labels = dataset.labels
    test_mask = np.zeros(dataset.n_rows, dtype=bool)
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        if len(idx) == 0:
            continue
        if len(idx) < 2:
            raise TooFewSamples(f"class {cls} has {len(idx)} member(s), cannot split")
        n_test = int(np.floor(test_fraction * len(idx) + 0.5))
        n_test = min(max(n_test, 1), len(idx) - 1)
        shuffled = rng_for(seed, cls).permutation(idx)
        test_mask[shuffled[:n_test]] = True
    return dataset.subset(np.flatnonzero(~test_mask)), dataset.subset(np.flatnonzero(test_mask))


def confusion_from_predictions(y_true, y_pred) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    return ConfusionMatrix(
        tp=int(np.sum((y_pred == 1) & (y_true == 1))),
        fp=int(np.sum((y_pred == 1) & (y_true == 0))),
        fn=int(np.sum((y_pred == 0) & (y_true == 1))),
        tn=int(np.sum((y_pred == 0) & (y_true == 0))),
    )


def classification_metrics(cm: ConfusionMatrix) -> tuple[float, float, float, float]:
    """(accuracy, precision, recall, f1) with zero-denominator conventions.

    precision and recall are defined as 0 when their denominator is 0, and
    f1 is 0 when precision + recall is 0.
    """
    if cm.total < 1:
        raise ValueError("empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp > 0 else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn > 0 else 0.0
    denom = precision + recall
    f1 = 2 * precision * recall / denom if denom > 0 else 0.0
    return accuracy, precision, recall, f1


def roc_curve(labels, scores) -> tuple[list[tuple[float, float]], float]:
    """ROC points from (0,0) to (1,1) and the trapezoidal AUC.

    Scores are swept descending with exact ties grouped into a single
    threshold step, so tied blocks move diagonally and an all-tied input
    scores exactly 0.5.
    """
    labels = np.asarray(labels, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape:
        raise ValueError("labels and scores must have equal length")
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("ROC needs both classes present")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]

    points = [(0.0, 0.0)]
    auc = 0.0
    tp = fp = 0
    i = 0
    n = len(order)
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            j += 1
        tp += int(np.sum(sorted_labels[i:j] == 1))
        fp += int(np.sum(sorted_labels[i:j] == 0))
        fpr = fp / n_neg
        tpr = tp / n_pos
        prev_fpr, prev_tpr = points[-1]
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0
        points.append((fpr, tpr))
        i = j
    return points, auc


def evaluate_model(model, test: LabeledDataset, threshold_rule: str = "model") -> EvalReport:
    """Score a fitted model on a test dataset.

    Classes come from the model's own decision rule; ROC/AUC from its
    real-valued scores. threshold_rule "model" is the only rule implemented.
    """
    if threshold_rule != "model":
        raise ValueError(f"unknown threshold_rule {threshold_rule!r}")
    scores = model.predict_scores(test.features)
    classes = model.predict_classes(test.features)
    cm = confusion_from_predictions(test.labels, classes)
    accuracy, precision, recall, f1 = classification_metrics(cm)
    points, auc = roc_curve(test.labels, scores)
    return EvalReport(
        model_name=model.name,
        confusion=cm,
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        roc_points=tuple(points),
        auc=auc,
    )


def report_to_json(report: EvalReport, provenance: dict | None = None) -> str:
    payload = report.to_dict()
    if provenance is not None:
        payload["provenance"] = provenance
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_roc_csv(report: EvalReport, sink) -> None:
    close = False
    if isinstance(sink, (str, Path)):
        sink = open(sink, "w", encoding="utf-8", newline="")
        close = True
    try:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(["fpr", "tpr"])
        for fpr, tpr in report.roc_points:
            writer.writerow([repr(fpr), repr(tpr)])
    finally:
        if close:
            sink.close()

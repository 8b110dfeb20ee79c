"""Utility and classification-quality metrics: average class size, penalty-based
classification metric, accuracy, and ROC/AUC."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .partition import Partition


@dataclass(frozen=True)
class RocCurve:
    """ROC points from a descending-threshold sweep plus the trapezoidal area."""

    points: tuple[tuple[float, float], ...]
    auc: float
    positives: int
    negatives: int


@dataclass(frozen=True)
class EvalReport:
    """Classifier evaluation summary on a test split."""

    accuracy: float
    auc: float
    roc_points: tuple[tuple[float, float], ...]
    positives: int
    negatives: int


def avg_class_size_metric(record_count: int, k: int, class_count: int) -> float:
    """Released records divided by (k * number of classes); 1.0 is optimal.

    ``record_count`` is the post-suppression size of the released table.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if class_count < 1:
        raise ValueError(f"class_count must be >= 1, got {class_count}")
    return record_count / (k * class_count)


def classification_metric(original_count: int, partition: Partition) -> float:
    """Fraction of original records either suppressed or carrying a non-modal
    sensitive value within their equivalence class."""
    if original_count == 0:
        raise ValueError("original_count must be positive")
    penalties = len(partition.suppressed)
    for ec in partition.classes:
        penalties += ec.size - max(ec.sa_counts.values())
    return penalties / original_count


def accuracy(labels: Sequence[int], predictions: Sequence[int]) -> float:
    """Fraction of positions where prediction equals label."""
    labels = np.asarray(labels)
    predictions = np.asarray(predictions)
    if labels.shape != predictions.shape:
        raise ValueError(f"length mismatch: {labels.shape} labels vs {predictions.shape} predictions")
    if labels.size == 0:
        raise ValueError("empty label sequence")
    return float(np.mean(labels == predictions))


def roc_auc(labels: Sequence[int], scores: Sequence[float]) -> RocCurve:
    """ROC curve and area under it.

    Thresholds sweep the distinct scores in descending order with ties grouped,
    producing points from (0,0) to (1,1); the area is the trapezoidal sum,
    which equals the pairwise concordance statistic.
    """
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=float)
    if y.shape != s.shape:
        raise ValueError("labels and scores have different lengths")
    positives = int((y == 1).sum())
    negatives = int((y == 0).sum())
    if positives == 0 or negatives == 0:
        raise ValueError("both classes must be present to compute a ROC curve")

    order = np.argsort(-s, kind="stable")
    sorted_scores = s[order]
    sorted_labels = y[order]
    tp = np.cumsum(sorted_labels == 1)
    fp = np.cumsum(sorted_labels == 0)
    # keep only the last index of each tied score group
    boundary = np.nonzero(np.append(sorted_scores[1:] != sorted_scores[:-1], True))[0]
    tpr = np.concatenate(([0.0], tp[boundary] / positives))
    fpr = np.concatenate(([0.0], fp[boundary] / negatives))
    auc = float(np.sum((fpr[1:] - fpr[:-1]) * (tpr[1:] + tpr[:-1]) / 2.0))
    points = tuple(zip(fpr.tolist(), tpr.tolist()))
    return RocCurve(points, auc, positives, negatives)

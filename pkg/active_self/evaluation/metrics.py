"""Confusion matrices, per-class precision/recall, accuracy, labeled-data accounting."""

from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from ..errors import DataError, DimensionError


@dataclass
class ConfusionMatrix:
    """K×K counts; rows are true classes, columns predicted classes."""
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 2 or self.counts.shape[0] != self.counts.shape[1]:
            raise DimensionError(f"confusion matrix must be square, got shape {self.counts.shape}")
        if np.any(self.counts < 0):
            raise DataError("confusion matrix counts must be non-negative")

    @classmethod
    def from_labels(cls, y_true: np.ndarray, y_pred: np.ndarray, n_classes: int) -> "ConfusionMatrix":
        y_true = np.asarray(y_true, dtype=np.int64)
        y_pred = np.asarray(y_pred, dtype=np.int64)
        if y_true.shape != y_pred.shape:
            raise DimensionError(f"{len(y_true)} true labels vs {len(y_pred)} predictions")
        counts = np.zeros((n_classes, n_classes), dtype=np.int64)
        np.add.at(counts, (y_true, y_pred), 1)
        return cls(counts)

    @property
    def n_classes(self) -> int:
        return int(self.counts.shape[0])

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class ClassMetrics:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    precision_undefined: bool = False
    recall_undefined: bool = False


@dataclass
class MetricsReport:
    """Percentages throughout."""
    accuracy: float
    per_class: List[ClassMetrics]
    macro_precision: float
    macro_recall: float
    flags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "precision": [c.precision for c in self.per_class],
            "recall": [c.recall for c in self.per_class],
            "flags": list(self.flags),
        }


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """
    One-vs-rest TP/FP/FN/TN per class, precision and recall per class,
    macro averages, and overall accuracy, all in percent.

    A class never predicted has undefined precision; it is reported as 0 and
    flagged. Likewise for recall of a class absent from the true labels.
    """
    total = cm.total
    if total <= 0:
        raise DataError("metrics need a non-empty confusion matrix")
    counts = cm.counts
    per_class: List[ClassMetrics] = []
    flags: List[str] = []
    for k in range(cm.n_classes):
        tp = int(counts[k, k])
        fp = int(counts[:, k].sum()) - tp
        fn = int(counts[k, :].sum()) - tp
        tn = total - tp - fp - fn
        p_undef = tp + fp == 0
        r_undef = tp + fn == 0
        if p_undef:
            flags.append(f"precision undefined for class {k} (never predicted)")
        if r_undef:
            flags.append(f"recall undefined for class {k} (no true samples)")
        per_class.append(ClassMetrics(
            tp=tp, fp=fp, fn=fn, tn=tn,
            precision=0.0 if p_undef else 100.0 * tp / (tp + fp),
            recall=0.0 if r_undef else 100.0 * tp / (tp + fn),
            precision_undefined=p_undef,
            recall_undefined=r_undef,
        ))
    return MetricsReport(
        accuracy=100.0 * float(np.trace(counts)) / total,
        per_class=per_class,
        macro_precision=float(np.mean([c.precision for c in per_class])),
        macro_recall=float(np.mean([c.recall for c in per_class])),
        flags=flags,
    )


def accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Percent of exact matches."""
    y_true = np.asarray(y_true)
    if len(y_true) == 0:
        raise DataError("accuracy needs at least one prediction")
    return 100.0 * float(np.mean(y_true == np.asarray(y_pred)))


def labeled_percentage(ledger, total_windows: int) -> float:
    """100 · unique queried windows / all target windows (train and test)."""
    if total_windows <= 0:
        raise DataError(f"total window count must be positive, got {total_windows}")
    return 100.0 * ledger.count / total_windows


def query_budget(n_per_boundary: int, n_classes: int) -> int:
    """N·K·(K − 1)/2, the most new queries one iteration can make."""
    return n_per_boundary * n_classes * (n_classes - 1) // 2

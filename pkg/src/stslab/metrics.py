"""Confusion matrices and misclassification rates against oracle labels."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import KMismatch


@dataclass
class MetricsReport:
    confusion: np.ndarray                  # (C, C), rows = true label, cols = predicted
    per_class_rate: list[float | None]     # None for classes with no test samples
    per_class_stderr: list[float | None]
    overall_rate: float
    overall_stderr: float
    n_samples: int

    @property
    def n_classes(self) -> int:
        return self.confusion.shape[0]


def misclassification_from_labels(true_labels: np.ndarray, predicted: np.ndarray,
                                  n_classes: int) -> MetricsReport:
    """Report from 1-based true/predicted label arrays."""
    true_idx = np.asarray(true_labels, dtype=np.int64) - 1
    pred_idx = np.asarray(predicted, dtype=np.int64) - 1
    n = true_idx.shape[0]
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (true_idx, pred_idx), 1)
    per_class: list[float | None] = []
    per_stderr: list[float | None] = []
    for c in range(n_classes):
        total = int(confusion[c].sum())
        if total == 0:
            per_class.append(None)
            per_stderr.append(None)
            continue
        wrong = total - int(confusion[c, c])
        rate = wrong / total
        per_class.append(rate)
        per_stderr.append(math.sqrt(max(rate * (1.0 - rate), 0.0) / total))
    overall = float(np.count_nonzero(true_idx != pred_idx)) / n
    overall_stderr = math.sqrt(max(overall * (1.0 - overall), 0.0) / n)
    return MetricsReport(confusion=confusion, per_class_rate=per_class,
                         per_class_stderr=per_stderr, overall_rate=overall,
                         overall_stderr=overall_stderr, n_samples=n)


def misclassification_report(model, test_ds: Dataset) -> MetricsReport:
    """Evaluate a TrainedModel on a labeled test dataset."""
    if model.k != test_ds.k:
        raise KMismatch(f"model trained for K={model.k}, dataset has K={test_ds.k}")
    predicted = model.predict(test_ds.features)
    return misclassification_from_labels(test_ds.labels, predicted, test_ds.n_classes)

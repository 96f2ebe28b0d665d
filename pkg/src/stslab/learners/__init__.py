"""The five classifiers behind one dataset-facing train/predict contract.

Per-variant train/predict functions work on plain arrays with 0-based class
indices; TrainedModel wraps them behind the feature-matrix interface the rest
of the package uses (normalized 4xK inputs, labels in 1..K+1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import TrainConfig
from ..dataset import Dataset
from .adam import AdamState, adam_step, init_adam
from .gradcheck import GradCheckReport, gradient_check
from .knn import KnnModel, predict_knn, train_knn
from .lstm import LstmModel, predict_lstm, train_lstm
from .mlp import MlpModel, predict_mlp, train_mlp
from .naive_bayes import GnbModel, predict_gnb, train_gnb
from .svm import SvmModel, predict_svm, train_svm

VARIANTS = ("knn", "gnb", "svm", "mlp", "lstm")


@dataclass
class TrainedModel:
    """One trained classifier plus its prediction contract over 4xK features."""

    variant: str
    k: int                     # transmitters the model was trained for
    n_classes: int             # K+1
    inner: object
    notes: dict = field(default_factory=dict)

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Labels in 1..K+1 for one (4,K) matrix or a (n,4,K) batch."""
        features = np.asarray(features, dtype=float)
        single = features.ndim == 2
        if single:
            features = features[None]
        n = features.shape[0]
        if self.variant == "lstm":
            x = features.transpose(0, 2, 1)  # (n, K, 4): one timestep per column
            idx = predict_lstm(self.inner, x)
        else:
            x = features.transpose(0, 2, 1).reshape(n, -1)  # flattening order
            idx = _FLAT_PREDICT[self.variant](self.inner, x)
        labels = np.asarray(idx, dtype=np.int64) + 1
        return labels[0] if single else labels

    def policy(self):
        """The callable shape policy_sop expects."""
        return self.predict


_FLAT_PREDICT = {
    "knn": predict_knn,
    "gnb": predict_gnb,
    "svm": predict_svm,
    "mlp": predict_mlp,
}


def train_model(variant: str, ds: Dataset, tc: TrainConfig) -> TrainedModel:
    """Train one of the five variants on a generated dataset."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r} (known: {', '.join(VARIANTS)})")
    y_idx = ds.labels.astype(np.int64) - 1
    n_classes = ds.n_classes
    notes: dict = {}
    if variant == "lstm":
        inner = train_lstm(ds.sequence_features(), y_idx, n_classes, tc)
    elif variant == "mlp":
        inner = train_mlp(ds.flat_features(), y_idx, n_classes, tc)
    elif variant == "svm":
        inner = train_svm(ds.flat_features(), y_idx, n_classes, tc)
        if inner.non_convergence:
            notes["non_convergence"] = True
    elif variant == "gnb":
        inner = train_gnb(ds.flat_features(), y_idx, n_classes)
        if inner.absent_classes:
            notes["absent_classes"] = [c + 1 for c in inner.absent_classes]
    else:
        inner = train_knn(ds.flat_features(), y_idx, n_classes, tc.knn_k)
    return TrainedModel(variant=variant, k=ds.k, n_classes=n_classes, inner=inner, notes=notes)


__all__ = [
    "VARIANTS", "TrainedModel", "train_model",
    "AdamState", "adam_step", "init_adam",
    "GradCheckReport", "gradient_check",
    "KnnModel", "train_knn", "predict_knn",
    "GnbModel", "train_gnb", "predict_gnb",
    "SvmModel", "train_svm", "predict_svm",
    "MlpModel", "train_mlp", "predict_mlp",
    "LstmModel", "train_lstm", "predict_lstm",
]

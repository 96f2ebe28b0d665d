"""Gaussian naive Bayes with per-class diagonal covariance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyDataset

VARIANCE_FLOOR = 1e-9
QUERY_CHUNK = 8192


@dataclass
class GnbModel:
    means: np.ndarray       # (C, d)
    variances: np.ndarray   # (C, d), floored
    log_priors: np.ndarray  # (C,), -inf for classes absent from training data
    absent_classes: tuple[int, ...]  # 0-based, unreachable at prediction
    n_classes: int


def train_gnb(x: np.ndarray, y_idx: np.ndarray, n_classes: int) -> GnbModel:
    x = np.asarray(x, dtype=float)
    y_idx = np.asarray(y_idx)
    n, d = x.shape if x.ndim == 2 else (x.shape[0], 1)
    if n == 0:
        raise EmptyDataset("cannot train naive Bayes on zero samples")
    x = x.reshape(n, -1)
    means = np.zeros((n_classes, x.shape[1]))
    variances = np.full((n_classes, x.shape[1]), VARIANCE_FLOOR)
    log_priors = np.full(n_classes, -np.inf)
    absent = []
    for c in range(n_classes):
        mask = y_idx == c
        count = int(mask.sum())
        if count == 0:
            absent.append(c)
            continue
        means[c] = x[mask].mean(axis=0)
        variances[c] = np.maximum(x[mask].var(axis=0), VARIANCE_FLOOR)
        log_priors[c] = np.log(count / n)
    return GnbModel(means=means, variances=variances, log_priors=log_priors,
                    absent_classes=tuple(absent), n_classes=n_classes)


def gnb_log_posterior(model: GnbModel, x: np.ndarray) -> np.ndarray:
    """(n, C) unnormalized log posteriors: sum of log densities + log prior."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.empty((x.shape[0], model.n_classes))
    log_norm = -0.5 * np.log(2.0 * np.pi * model.variances).sum(axis=1)  # (C,)
    for start in range(0, x.shape[0], QUERY_CHUNK):
        q = x[start:start + QUERY_CHUNK]
        diff = q[:, None, :] - model.means[None, :, :]
        quad = -0.5 * (diff * diff / model.variances[None, :, :]).sum(axis=2)
        out[start:start + QUERY_CHUNK] = quad + log_norm + model.log_priors
    return out


def predict_gnb(model: GnbModel, x: np.ndarray) -> np.ndarray:
    """0-based class indices; ties resolve to the smallest class."""
    return np.argmax(gnb_log_posterior(model, x), axis=1)

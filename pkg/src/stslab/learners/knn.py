"""k-nearest-neighbors classifier on flattened feature vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyDataset

QUERY_CHUNK = 2048


@dataclass
class KnnModel:
    train_x: np.ndarray  # (n, d)
    train_y: np.ndarray  # (n,) 0-based class indices
    k_neighbors: int
    n_classes: int


def train_knn(x: np.ndarray, y_idx: np.ndarray, n_classes: int, k_neighbors: int = 5) -> KnnModel:
    if x.shape[0] == 0:
        raise EmptyDataset("cannot train k-NN on zero samples")
    return KnnModel(train_x=np.asarray(x, dtype=float), train_y=np.asarray(y_idx),
                    k_neighbors=min(k_neighbors, x.shape[0]), n_classes=n_classes)


TIE_SLACK = 16  # extra partition width so boundary distance ties resolve by index


def _k_nearest(d2: np.ndarray, k: int) -> np.ndarray:
    """(n, k) training indices of the k nearest; distance ties -> smaller index."""
    n_ref = d2.shape[1]
    if n_ref <= k + TIE_SLACK:
        order = np.argsort(d2, axis=1, kind="stable")
        return order[:, :k]
    width = k + TIE_SLACK
    cand = np.sort(np.argpartition(d2, width - 1, axis=1)[:, :width], axis=1)
    cand_d2 = np.take_along_axis(d2, cand, axis=1)
    order = np.argsort(cand_d2, axis=1, kind="stable")  # index-ascending candidates
    picked = np.take_along_axis(cand, order[:, :k], axis=1)
    # a boundary tie wider than the slack window needs the full row
    kth = np.take_along_axis(cand_d2, order[:, k - 1:k], axis=1)[:, 0]
    last = np.take_along_axis(cand_d2, order[:, -1:], axis=1)[:, 0]
    for row in np.flatnonzero(last <= kth):
        full = np.argsort(d2[row], kind="stable")
        picked[row] = full[:k]
    return picked


def predict_knn(model: KnnModel, x: np.ndarray) -> np.ndarray:
    """Majority vote among the k nearest by Euclidean distance.

    Distance ties resolve to the smaller training index; vote ties resolve to
    the smallest class index.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    ref = model.train_x
    ref_sq = (ref * ref).sum(axis=1)
    out = np.empty(x.shape[0], dtype=np.int64)
    for start in range(0, x.shape[0], QUERY_CHUNK):
        q = x[start:start + QUERY_CHUNK]
        d2 = (q * q).sum(axis=1)[:, None] + ref_sq[None, :] - 2.0 * (q @ ref.T)
        nearest = _k_nearest(d2, model.k_neighbors)
        votes = np.zeros((q.shape[0], model.n_classes), dtype=np.int64)
        np.add.at(votes, (np.arange(q.shape[0])[:, None], model.train_y[nearest]), 1)
        out[start:start + QUERY_CHUNK] = np.argmax(votes, axis=1)
    return out

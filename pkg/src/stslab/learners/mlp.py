"""Fully connected classifier: input -> 256 ReLU -> 128 ReLU -> softmax."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import TrainConfig
from ..errors import DivergedLoss, EmptyDataset
from .adam import adam_step, init_adam


@dataclass
class MlpModel:
    weights: dict[str, np.ndarray]  # w1,b1,w2,b2,w3,b3
    n_classes: int


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, shape)


def init_mlp(n_in: int, n_classes: int, rng: np.random.Generator,
             h1: int = 256, h2: int = 128) -> dict[str, np.ndarray]:
    return {
        "w1": glorot_uniform(rng, n_in, h1, (n_in, h1)),
        "b1": np.zeros(h1),
        "w2": glorot_uniform(rng, h1, h2, (h1, h2)),
        "b2": np.zeros(h2),
        "w3": glorot_uniform(rng, h2, n_classes, (h2, n_classes)),
        "b3": np.zeros(n_classes),
    }


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def mlp_logits(weights: dict[str, np.ndarray], x: np.ndarray) -> np.ndarray:
    a1 = np.maximum(x @ weights["w1"] + weights["b1"], 0.0)
    a2 = np.maximum(a1 @ weights["w2"] + weights["b2"], 0.0)
    return a2 @ weights["w3"] + weights["b3"]


def mlp_loss_and_grads(weights: dict[str, np.ndarray], x: np.ndarray,
                       y_idx: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy over the batch and gradients for every parameter."""
    n = x.shape[0]
    a1 = np.maximum(x @ weights["w1"] + weights["b1"], 0.0)
    a2 = np.maximum(a1 @ weights["w2"] + weights["b2"], 0.0)
    logits = a2 @ weights["w3"] + weights["b3"]
    probs = softmax(logits)
    loss = float(-np.log(np.maximum(probs[np.arange(n), y_idx], 1e-300)).mean())

    dlogits = probs
    dlogits[np.arange(n), y_idx] -= 1.0
    dlogits /= n
    grads = {
        "w3": a2.T @ dlogits,
        "b3": dlogits.sum(axis=0),
    }
    da2 = dlogits @ weights["w3"].T
    da2[a2 == 0.0] = 0.0
    grads["w2"] = a1.T @ da2
    grads["b2"] = da2.sum(axis=0)
    da1 = da2 @ weights["w2"].T
    da1[a1 == 0.0] = 0.0
    grads["w1"] = x.T @ da1
    grads["b1"] = da1.sum(axis=0)
    return loss, grads


def train_mlp(x: np.ndarray, y_idx: np.ndarray, n_classes: int, tc: TrainConfig) -> MlpModel:
    """Minibatch Adam training; deterministic for a given TrainConfig.seed."""
    if x.shape[0] == 0:
        raise EmptyDataset("cannot train MLP on zero samples")
    rng = np.random.default_rng(tc.seed)
    weights = init_mlp(x.shape[1], n_classes, rng, tc.mlp_hidden1, tc.mlp_hidden2)
    state = init_adam(weights)
    n = x.shape[0]
    for _ in range(tc.epochs):
        order = rng.permutation(n)
        for start in range(0, n, tc.minibatch):
            idx = order[start:start + tc.minibatch]
            loss, grads = mlp_loss_and_grads(weights, x[idx], y_idx[idx])
            if not np.isfinite(loss):
                raise DivergedLoss(f"MLP loss became {loss}")
            adam_step(weights, grads, state, tc)
    return MlpModel(weights=weights, n_classes=n_classes)


def mlp_probabilities(model: MlpModel, x: np.ndarray) -> np.ndarray:
    return softmax(mlp_logits(model.weights, np.atleast_2d(x)))


def predict_mlp(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """0-based class indices for a (n, d) batch."""
    return np.argmax(mlp_logits(model.weights, np.atleast_2d(x)), axis=1)

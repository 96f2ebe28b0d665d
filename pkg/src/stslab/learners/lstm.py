"""Peephole LSTM classifier trained by backpropagation through time.

Gates use the logistic sigmoid, the cell candidate uses tanh, and the input,
forget and output gates each carry a peephole weight vector reading the cell
state (the output gate reads the freshly updated cell). The class head is a
softmax on the hidden state after the final timestep.

Gate blocks are fused as [i | f | g | o] along the last axis of the input and
recurrent weight matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import TrainConfig
from ..errors import DivergedLoss, EmptyDataset
from .adam import adam_step, init_adam
from .mlp import glorot_uniform, softmax


@dataclass
class LstmModel:
    weights: dict[str, np.ndarray]
    n_classes: int
    hidden: int


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init_lstm(n_in: int, n_classes: int, hidden: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Glorot-uniform blocks per gate, zero biases; fixed draw order."""
    h = hidden
    wx = np.concatenate([glorot_uniform(rng, n_in, h, (n_in, h)) for _ in range(4)], axis=1)
    wh = np.concatenate([glorot_uniform(rng, h, h, (h, h)) for _ in range(4)], axis=1)
    p_i = glorot_uniform(rng, h, h, h)
    p_f = glorot_uniform(rng, h, h, h)
    p_o = glorot_uniform(rng, h, h, h)
    wy = glorot_uniform(rng, h, n_classes, (h, n_classes))
    return {
        "wx": wx, "wh": wh, "b": np.zeros(4 * h),
        "p_i": p_i, "p_f": p_f, "p_o": p_o,
        "wy": wy, "by": np.zeros(n_classes),
    }


def lstm_forward(weights: dict[str, np.ndarray], x_seq: np.ndarray,
                 return_cache: bool = False):
    """Run (n, T, d) sequences; returns class logits (n, C) and optionally the
    per-step cache needed by BPTT."""
    n, t_steps, _ = x_seq.shape
    h = weights["p_i"].shape[0]
    wx, wh, b = weights["wx"], weights["wh"], weights["b"]
    p_i, p_f, p_o = weights["p_i"], weights["p_f"], weights["p_o"]
    h_t = np.zeros((n, h))
    c_t = np.zeros((n, h))
    cache = [] if return_cache else None
    for t in range(t_steps):
        x_t = x_seq[:, t, :]
        z = x_t @ wx + h_t @ wh + b
        zi, zf, zg, zo = z[:, :h], z[:, h:2 * h], z[:, 2 * h:3 * h], z[:, 3 * h:]
        c_prev = c_t
        gate_i = sigmoid(zi + c_prev * p_i)
        gate_f = sigmoid(zf + c_prev * p_f)
        cand = np.tanh(zg)
        c_t = gate_f * c_prev + gate_i * cand
        gate_o = sigmoid(zo + c_t * p_o)
        tanh_c = np.tanh(c_t)
        h_prev = h_t
        h_t = gate_o * tanh_c
        if return_cache:
            cache.append((x_t, h_prev, c_prev, gate_i, gate_f, cand, gate_o, c_t, tanh_c))
    logits = h_t @ weights["wy"] + weights["by"]
    if return_cache:
        return logits, h_t, cache
    return logits


def lstm_loss_and_grads(weights: dict[str, np.ndarray], x_seq: np.ndarray,
                        y_idx: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy and full-BPTT gradients over all timesteps."""
    n = x_seq.shape[0]
    h = weights["p_i"].shape[0]
    logits, h_last, cache = lstm_forward(weights, x_seq, return_cache=True)
    probs = softmax(logits)
    loss = float(-np.log(np.maximum(probs[np.arange(n), y_idx], 1e-300)).mean())

    dlogits = probs
    dlogits[np.arange(n), y_idx] -= 1.0
    dlogits /= n

    grads = {name: np.zeros_like(p) for name, p in weights.items()}
    grads["wy"] = h_last.T @ dlogits
    grads["by"] = dlogits.sum(axis=0)

    wh = weights["wh"]
    p_i, p_f, p_o = weights["p_i"], weights["p_f"], weights["p_o"]
    dh = dlogits @ weights["wy"].T  # only the final hidden state feeds the head
    dc_carry = np.zeros((n, h))
    for t in range(len(cache) - 1, -1, -1):
        x_t, h_prev, c_prev, gate_i, gate_f, cand, gate_o, c_t, tanh_c = cache[t]
        dzo = dh * tanh_c * gate_o * (1.0 - gate_o)
        dc = dh * gate_o * (1.0 - tanh_c ** 2) + dc_carry + dzo * p_o
        dzi = dc * cand * gate_i * (1.0 - gate_i)
        dzf = dc * c_prev * gate_f * (1.0 - gate_f)
        dzg = dc * gate_i * (1.0 - cand ** 2)
        grads["p_o"] += (dzo * c_t).sum(axis=0)
        grads["p_i"] += (dzi * c_prev).sum(axis=0)
        grads["p_f"] += (dzf * c_prev).sum(axis=0)
        dz = np.concatenate([dzi, dzf, dzg, dzo], axis=1)
        grads["wx"] += x_t.T @ dz
        grads["wh"] += h_prev.T @ dz
        grads["b"] += dz.sum(axis=0)
        dh = dz @ wh.T
        dc_carry = dc * gate_f + dzi * p_i + dzf * p_f
    return loss, grads


def train_lstm(x_seq: np.ndarray, y_idx: np.ndarray, n_classes: int,
               tc: TrainConfig) -> LstmModel:
    """Minibatch Adam over full-sequence BPTT; deterministic per seed."""
    if x_seq.shape[0] == 0:
        raise EmptyDataset("cannot train LSTM on zero samples")
    rng = np.random.default_rng(tc.seed)
    weights = init_lstm(x_seq.shape[2], n_classes, tc.lstm_hidden, rng)
    state = init_adam(weights)
    n = x_seq.shape[0]
    for _ in range(tc.epochs):
        order = rng.permutation(n)
        for start in range(0, n, tc.minibatch):
            idx = order[start:start + tc.minibatch]
            loss, grads = lstm_loss_and_grads(weights, x_seq[idx], y_idx[idx])
            if not np.isfinite(loss):
                raise DivergedLoss(f"LSTM loss became {loss}")
            adam_step(weights, grads, state, tc)
    return LstmModel(weights=weights, n_classes=n_classes, hidden=tc.lstm_hidden)


def lstm_probabilities(model: LstmModel, x_seq: np.ndarray) -> np.ndarray:
    return softmax(lstm_forward(model.weights, x_seq))


def predict_lstm(model: LstmModel, x_seq: np.ndarray) -> np.ndarray:
    """0-based class indices for (n, T, d) sequences."""
    return np.argmax(lstm_forward(model.weights, x_seq), axis=1)


def parameter_count(hidden: int, n_in: int, n_out: int) -> int:
    """Weight count excluding biases: 4*h^2 + 4*n_in*h + h*n_out + 3*h."""
    return 4 * hidden * hidden + 4 * n_in * hidden + hidden * n_out + 3 * hidden

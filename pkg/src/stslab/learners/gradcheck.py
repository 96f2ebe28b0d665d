"""Central-finite-difference verification of the MLP and LSTM backprop.

ReLU makes the MLP loss piecewise smooth: a coordinate whose probe crosses an
activation kink has no valid central difference at that point. The checker
detects pattern changes between the two probes, retries with a 100x smaller
step, and skips the coordinate if it still crosses (counted in the report).
The LSTM is smooth, so no special handling is needed there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import TrainConfig
from ..errors import NonDifferentiableVariant
from .lstm import init_lstm, lstm_forward, lstm_loss_and_grads
from .mlp import init_mlp, mlp_loss_and_grads, softmax

LSTM_PARAM_SAMPLE = 800  # random coordinates checked for the LSTM (>= 500)


@dataclass(frozen=True)
class GradCheckReport:
    variant: str
    max_rel_error: float
    worst_param: str
    worst_index: int
    n_checked: int
    n_kink_skipped: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance


def _cross_entropy(logits: np.ndarray, y_idx: np.ndarray) -> float:
    probs = softmax(logits)
    return float(-np.log(np.maximum(probs[np.arange(len(y_idx)), y_idx], 1e-300)).mean())


def _mlp_loss_and_pattern(params, x, y_idx) -> tuple[float, bytes]:
    a1 = np.maximum(x @ params["w1"] + params["b1"], 0.0)
    a2 = np.maximum(a1 @ params["w2"] + params["b2"], 0.0)
    logits = a2 @ params["w3"] + params["b3"]
    pattern = (a1 > 0).tobytes() + (a2 > 0).tobytes()
    return _cross_entropy(logits, y_idx), pattern


def _relative_errors(params, loss_fn, grads, coords, step):
    """loss_fn() -> (loss, pattern); pattern changes invalidate the probe."""
    worst, worst_param, worst_index = 0.0, "", -1
    skipped = 0
    for name, flat_idx in coords:
        arr = params[name]
        orig = arr.flat[flat_idx]
        numeric = None
        for h in (step, step / 100.0):
            arr.flat[flat_idx] = orig + h
            loss_plus, pat_plus = loss_fn()
            arr.flat[flat_idx] = orig - h
            loss_minus, pat_minus = loss_fn()
            arr.flat[flat_idx] = orig
            if pat_plus == pat_minus:
                numeric = (loss_plus - loss_minus) / (2.0 * h)
                break
        if numeric is None:
            skipped += 1
            continue
        analytic = grads[name].flat[flat_idx]
        rel = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
        if rel > worst:
            worst, worst_param, worst_index = rel, name, flat_idx
    return worst, worst_param, worst_index, skipped


def gradient_check(variant: str, batch: tuple[np.ndarray, np.ndarray],
                   step: float = 1e-5, tolerance: float = 1e-4,
                   tc: TrainConfig | None = None, n_classes: int | None = None,
                   seed: int = 0) -> GradCheckReport:
    """Compare analytic gradients against central differences on one batch.

    MLP checks every parameter; LSTM checks a seeded random subsample of
    LSTM_PARAM_SAMPLE coordinates. `batch` is (x, y_idx) with x flat (n, d)
    for the MLP and sequential (n, T, d) for the LSTM.
    """
    if variant not in ("mlp", "lstm"):
        raise NonDifferentiableVariant(f"{variant!r} has no analytic gradients to check")
    tc = tc or TrainConfig(seed=seed)
    x, y_idx = batch
    x = np.asarray(x, dtype=float)
    y_idx = np.asarray(y_idx)
    classes = n_classes if n_classes is not None else int(y_idx.max()) + 1
    rng = np.random.default_rng(seed)

    if variant == "mlp":
        params = init_mlp(x.shape[1], classes, rng, tc.mlp_hidden1, tc.mlp_hidden2)
        _, grads = mlp_loss_and_grads(params, x, y_idx)
        coords = [(name, i) for name, p in params.items() for i in range(p.size)]
        loss_fn = lambda: _mlp_loss_and_pattern(params, x, y_idx)
    else:
        params = init_lstm(x.shape[2], classes, tc.lstm_hidden, rng)
        _, grads = lstm_loss_and_grads(params, x, y_idx)
        all_coords = [(name, i) for name, p in params.items() for i in range(p.size)]
        take = min(LSTM_PARAM_SAMPLE, len(all_coords))
        picked = rng.choice(len(all_coords), take, replace=False)
        coords = [all_coords[i] for i in picked]
        loss_fn = lambda: (_cross_entropy(lstm_forward(params, x), y_idx), b"")

    worst, worst_param, worst_index, skipped = _relative_errors(
        params, loss_fn, grads, coords, step)
    return GradCheckReport(variant=variant, max_rel_error=worst, worst_param=worst_param,
                           worst_index=worst_index, n_checked=len(coords) - skipped,
                           n_kink_skipped=skipped, tolerance=tolerance)

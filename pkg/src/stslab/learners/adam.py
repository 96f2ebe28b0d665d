"""Adam optimizer over named parameter dicts, with bias correction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import TrainConfig
from ..errors import ShapeMismatch


@dataclass
class AdamState:
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)  # first moments
    v: dict[str, np.ndarray] = field(default_factory=dict)  # second moments


def init_adam(params: dict[str, np.ndarray]) -> AdamState:
    return AdamState(
        step=0,
        m={name: np.zeros_like(p) for name, p in params.items()},
        v={name: np.zeros_like(p) for name, p in params.items()},
    )


def adam_step(params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
              state: AdamState, tc: TrainConfig) -> tuple[dict[str, np.ndarray], AdamState]:
    """One in-place Adam update; returns (params, state) for chaining."""
    if set(grads) != set(params):
        raise ShapeMismatch(f"gradient names {sorted(grads)} != parameter names {sorted(params)}")
    state.step += 1
    b1, b2 = tc.adam_beta1, tc.adam_beta2
    c1 = 1.0 - b1 ** state.step
    c2 = 1.0 - b2 ** state.step
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeMismatch(f"{name}: gradient shape {g.shape} != parameter shape {p.shape}")
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= tc.learning_rate * (m / c1) / (np.sqrt(v / c2) + tc.adam_eps)
    return params, state

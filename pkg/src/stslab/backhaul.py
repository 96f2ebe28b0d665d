"""Unreliable backhaul links: independent Bernoulli indicators per transmitter.

Subsets of {1..K} are enumerated as K-bit masks with bit k-1 carrying
transmitter k, so subset-decomposition results are reproducible.
"""

from __future__ import annotations

import numpy as np


def sample_backhaul(delta, rng: np.random.Generator) -> np.ndarray:
    """One draw of the K indicators; indicator[k] = 1 with probability delta[k]."""
    d = np.asarray(delta, dtype=float)
    return (rng.random(d.shape[0]) < d).astype(np.uint8)


def sample_backhaul_batch(delta, n: int, rng: np.random.Generator) -> np.ndarray:
    """(n, K) independent indicator draws."""
    d = np.asarray(delta, dtype=float)
    return (rng.random((n, d.shape[0])) < d).astype(np.uint8)


def active_set_probability(delta, active) -> float:
    """P[active backhaul set == active] = prod_{i in active} delta_i * prod_{j not} (1-delta_j).

    `active` holds 1-based transmitter indices.
    """
    d = np.asarray(delta, dtype=float)
    active = set(active)
    p = 1.0
    for k in range(d.shape[0]):
        p *= d[k] if (k + 1) in active else 1.0 - d[k]
    return p


def subset_from_mask(mask: int, k: int) -> tuple[int, ...]:
    """1-based transmitter indices carried by a K-bit mask (bit k-1 <-> transmitter k)."""
    return tuple(i + 1 for i in range(k) if mask >> i & 1)


def iter_subsets(k: int):
    """All 2^K subsets in mask order, as (mask, indices) pairs."""
    for mask in range(1 << k):
        yield mask, subset_from_mask(mask, k)

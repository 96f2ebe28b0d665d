"""Conventional optimal transmitter selection and SOP estimation.

The oracle picks the active transmitter with the largest secrecy rate; its SOP
is estimated either directly (joint channel+backhaul sampling) or through the
2^K subset decomposition. Both carry binomial standard errors so estimates can
be compared statistically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .backhaul import active_set_probability, iter_subsets, sample_backhaul_batch
from .channel import MC_CHUNK, _cgauss, batch_secrecy_rates, sample_channel_batch, solve_secondary_power
from .config import SystemConfig
from .errors import SubsetBudgetExceeded

MAX_SUBSET_K = 12


@dataclass(frozen=True)
class SelectionOutcome:
    """Result of one selection; selected is a 1-based index or None when no
    transmitter has an active backhaul."""

    selected: int | None
    secrecy_rate_achieved: float

    @property
    def no_active_transmitter(self) -> bool:
        return self.selected is None


@dataclass(frozen=True)
class SopEstimate:
    value: float
    stderr: float
    n_samples: int


def select_optimal(rates, backhaul) -> SelectionOutcome:
    """Argmax of secrecy rate over transmitters with active backhaul.

    Ties break toward the smallest index; all-inactive yields the
    NoActiveTransmitter outcome with rate 0.
    """
    rates = np.asarray(rates, dtype=float)
    indicators = np.asarray(backhaul, dtype=np.uint8)
    active = np.flatnonzero(indicators)
    if active.size == 0:
        return SelectionOutcome(selected=None, secrecy_rate_achieved=0.0)
    best = active[np.argmax(rates[active])]  # argmax returns the first max: smallest index
    return SelectionOutcome(selected=int(best) + 1, secrecy_rate_achieved=float(rates[best]))


def select_optimal_batch(rates: np.ndarray, indicators: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized oracle: (labels in 1..K+1, achieved rates) for (n,K) inputs.

    Label K+1 encodes NoActiveTransmitter (rate 0). Inactive entries are masked
    below any valid rate, so ties still resolve to the smallest active index.
    """
    n, k = rates.shape
    masked = np.where(indicators.astype(bool), rates, -1.0)
    best = np.argmax(masked, axis=1)
    any_active = indicators.any(axis=1)
    labels = np.where(any_active, best + 1, k + 1).astype(np.int32)
    achieved = np.where(any_active, np.take_along_axis(rates, best[:, None], axis=1)[:, 0], 0.0)
    return labels, achieved


def _binomial(outages: int, n: int) -> SopEstimate:
    p = outages / n
    return SopEstimate(value=p, stderr=math.sqrt(max(p * (1.0 - p), 0.0) / n), n_samples=n)


def sop_direct(cfg: SystemConfig, n_samples: int, rng: np.random.Generator) -> SopEstimate:
    """Monte Carlo SOP of optimal selection, sampling channels and backhaul jointly.

    NoActiveTransmitter realizations count as outage. Raises
    InfeasiblePrimaryConstraint when no secondary power satisfies the primary
    constraint.
    """
    if n_samples < 10_000:
        raise ValueError(f"n_samples must be >= 1e4, got {n_samples}")
    p_s = solve_secondary_power(cfg).require_feasible()
    outages = 0
    done = 0
    while done < n_samples:
        m = min(MC_CHUNK, n_samples - done)
        batch = sample_channel_batch(cfg, m, rng)
        indicators = sample_backhaul_batch(cfg.delta, m, rng)
        rates = batch_secrecy_rates(cfg, p_s, batch)
        _, achieved = select_optimal_batch(rates, indicators)
        any_active = indicators.any(axis=1)
        outage = ~any_active | (achieved < cfg.r_secrecy)
        outages += int(np.count_nonzero(outage))
        done += m
    return _binomial(outages, n_samples)


def _conditional_outage(cfg: SystemConfig, p_s: float, active_idx: np.ndarray,
                        n_samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """P[max_{k in S} C_s^k < R_th] by Monte Carlo, sampling only the links of S."""
    denom_scale_d = cfg.p_t
    inv_sd = np.asarray(cfg.inv_lambda_sd)[active_idx]
    inv_se = np.asarray(cfg.inv_lambda_se)[active_idx]
    outages = 0
    done = 0
    while done < n_samples:
        m = min(MC_CHUNK, n_samples - done)
        h_sd = _cgauss(rng, inv_sd, (m, active_idx.size))
        h_se = _cgauss(rng, inv_se, (m, active_idx.size))
        h_td = _cgauss(rng, cfg.inv_lambda_td, m)
        h_te = _cgauss(rng, cfg.inv_lambda_te, m)
        gamma_d = p_s * np.abs(h_sd) ** 2 / (denom_scale_d * np.abs(h_td) ** 2 + cfg.n0)[:, None]
        gamma_e = p_s * np.abs(h_se) ** 2 / (denom_scale_d * np.abs(h_te) ** 2 + cfg.n0)[:, None]
        rates = np.maximum(np.log2((1.0 + gamma_d) / (1.0 + gamma_e)), 0.0)
        outages += int(np.count_nonzero(rates.max(axis=1) < cfg.r_secrecy))
        done += m
    p = outages / n_samples
    return p, math.sqrt(max(p * (1.0 - p), 0.0) / n_samples)


def sop_decomposed(cfg: SystemConfig, n_samples_per_subset: int,
                   rng: np.random.Generator) -> SopEstimate:
    """Subset-decomposed SOP: sum over S of P[S] * P[max_{k in S} C_s^k < R_th].

    The empty subset contributes P[empty] * 1. The returned stderr combines the
    per-subset Monte Carlo errors as sqrt(sum P[S]^2 var_S).
    """
    k = cfg.k_transmitters
    if k > MAX_SUBSET_K:
        raise SubsetBudgetExceeded(f"K={k} exceeds the 2^{MAX_SUBSET_K} subset budget")
    p_s = solve_secondary_power(cfg).require_feasible()
    total = 0.0
    var = 0.0
    for mask, subset in iter_subsets(k):
        prob = active_set_probability(cfg.delta, subset)
        if prob == 0.0:
            continue
        if mask == 0:
            total += prob
            continue
        active_idx = np.asarray(subset) - 1
        cond, stderr = _conditional_outage(cfg, p_s, active_idx, n_samples_per_subset, rng)
        total += prob * cond
        var += (prob * stderr) ** 2
    return SopEstimate(value=total, stderr=math.sqrt(var), n_samples=n_samples_per_subset)


def policy_sop(cfg: SystemConfig, policy: Callable[[np.ndarray], np.ndarray],
               n_samples: int, rng: np.random.Generator) -> SopEstimate:
    """SOP achieved by a selection policy operating on normalized feature matrices.

    `policy` maps a batch of feature matrices (n, 4, K) to labels in 1..K+1,
    exactly the input the learners were trained on. Outage is counted when the
    policy abstains (label K+1), picks a transmitter whose backhaul is down, or
    picks one whose secrecy rate is below the threshold.
    """
    from .dataset import build_feature_batch, normalize_batch

    p_s = solve_secondary_power(cfg).require_feasible()
    outages = 0
    done = 0
    k = cfg.k_transmitters
    while done < n_samples:
        m = min(MC_CHUNK, n_samples - done)
        batch = sample_channel_batch(cfg, m, rng)
        indicators = sample_backhaul_batch(cfg.delta, m, rng)
        rates = batch_secrecy_rates(cfg, p_s, batch)
        features = normalize_batch(build_feature_batch(batch, indicators))
        labels = np.asarray(policy(features))
        abstain = labels == k + 1
        chosen = np.where(abstain, 0, labels - 1)
        chosen_active = np.take_along_axis(indicators, chosen[:, None], axis=1)[:, 0].astype(bool)
        chosen_rate = np.take_along_axis(rates, chosen[:, None], axis=1)[:, 0]
        outage = abstain | ~chosen_active | (chosen_rate < cfg.r_secrecy)
        outages += int(np.count_nonzero(outage))
        done += m
    return _binomial(outages, n_samples)

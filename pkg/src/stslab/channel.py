"""Fading channels, the secondary power constraint, SINRs and secrecy rates.

Channel coefficients are circularly-symmetric complex Gaussians, so |h|^2 is
exponential with mean 1/lambda. The secondary power solver inverts the primary
outage constraint P[Gamma_TR < Gamma_0] <= Phi in closed form for this fading
model and is cross-checked against a Monte Carlo oracle in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import DegenerateDenominator

# Fixed Monte Carlo chunk so estimates are reproducible for a given seed
# regardless of total sample count.
MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of every channel coefficient for K transmitters."""

    h_sd: np.ndarray  # (K,) complex, S_k -> D
    h_se: np.ndarray  # (K,) complex, S_k -> E
    h_sr: np.ndarray  # (K,) complex, S_k -> R
    h_tr: complex     # T -> R
    h_td: complex     # T -> D
    h_te: complex     # T -> E

    @property
    def k(self) -> int:
        return self.h_sd.shape[0]


def _cgauss(rng: np.random.Generator, variance, size) -> np.ndarray:
    """Circularly-symmetric complex Gaussian with E[|h|^2] = variance."""
    scale = np.sqrt(np.asarray(variance, dtype=float) / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def sample_channels(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one realization of all links with the configured variances."""
    h_sd = _cgauss(rng, cfg.inv_lambda_sd, cfg.k_transmitters)
    h_se = _cgauss(rng, cfg.inv_lambda_se, cfg.k_transmitters)
    h_sr = _cgauss(rng, cfg.inv_lambda_sr, cfg.k_transmitters)
    h_tr = complex(_cgauss(rng, cfg.inv_lambda_tr, ()))
    h_td = complex(_cgauss(rng, cfg.inv_lambda_td, ()))
    h_te = complex(_cgauss(rng, cfg.inv_lambda_te, ()))
    return ChannelRealization(h_sd=h_sd, h_se=h_se, h_sr=h_sr, h_tr=h_tr, h_td=h_td, h_te=h_te)


@dataclass(frozen=True)
class ChannelBatch:
    """n realizations drawn at once; only the links the consumers need."""

    h_sd: np.ndarray  # (n, K) complex
    h_se: np.ndarray  # (n, K) complex
    h_td: np.ndarray  # (n,) complex
    h_te: np.ndarray  # (n,) complex

    @property
    def n(self) -> int:
        return self.h_sd.shape[0]


def sample_channel_batch(cfg: SystemConfig, n: int, rng: np.random.Generator) -> ChannelBatch:
    """Vectorized draw of the links that enter secrecy rates and features.

    Draw order (h_sd, h_se, h_td, h_te) is fixed; datasets regenerated from the
    same seed are bit-identical.
    """
    k = cfg.k_transmitters
    return ChannelBatch(
        h_sd=_cgauss(rng, cfg.inv_lambda_sd, (n, k)),
        h_se=_cgauss(rng, cfg.inv_lambda_se, (n, k)),
        h_td=_cgauss(rng, cfg.inv_lambda_td, n),
        h_te=_cgauss(rng, cfg.inv_lambda_te, n),
    )


@dataclass(frozen=True)
class PowerSolution:
    """Secondary power solve result; infeasible constraints are flagged, not raised."""

    p_s: float
    feasible: bool
    baseline_outage: float  # primary outage at P_S = 0
    phi: float              # constraint the solve targeted

    def require_feasible(self) -> float:
        from .errors import InfeasiblePrimaryConstraint
        if not self.feasible:
            raise InfeasiblePrimaryConstraint(self.baseline_outage, self.phi)
        return self.p_s


def solve_secondary_power(cfg: SystemConfig) -> PowerSolution:
    """Largest P_S >= 0 keeping the primary outage P[Gamma_TR < Gamma_0] <= Phi.

    With |h_TR|^2 ~ Exp(mean 1/lam_tr) and |h_SR|^2 ~ Exp(mean 1/lam_sr), the
    outage at power p is 1 - exp(-lam_tr*G0*N0/PT) * lam_sr/(lam_sr + lam_tr*G0*p/PT);
    inverting at Phi gives p = (exp(-lam_tr*G0*N0/PT)/(1-Phi) - 1) * lam_sr*PT/(lam_tr*G0).
    The most interfered transmitter (largest 1/lambda_sr) is used so the
    constraint holds for every possible selection.
    """
    gamma0 = cfg.gamma0
    lam_tr = 1.0 / cfg.inv_lambda_tr
    lam_sr = 1.0 / max(cfg.inv_lambda_sr)
    e0 = math.exp(-lam_tr * gamma0 * cfg.n0 / cfg.p_t)
    baseline = 1.0 - e0
    if baseline > cfg.phi:
        return PowerSolution(p_s=0.0, feasible=False, baseline_outage=baseline, phi=cfg.phi)
    p_s = (e0 / (1.0 - cfg.phi) - 1.0) * lam_sr * cfg.p_t / (lam_tr * gamma0)
    return PowerSolution(p_s=max(p_s, 0.0), feasible=True, baseline_outage=baseline, phi=cfg.phi)


def primary_outage_mc(cfg: SystemConfig, p_s: float, n_samples: int,
                      rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo estimate (and standard error) of P[Gamma_TR < Gamma_0] at power p_s.

    Uses the most interfered transmitter's S-R link, matching the solver's
    convention.
    """
    gamma0 = cfg.gamma0
    inv_sr = max(cfg.inv_lambda_sr)
    outages = 0
    done = 0
    while done < n_samples:
        m = min(MC_CHUNK, n_samples - done)
        g_tr = rng.exponential(cfg.inv_lambda_tr, m)     # |h_TR|^2
        g_sr = rng.exponential(inv_sr, m)                # |h_SR|^2
        gamma_tr = cfg.p_t * g_tr / (p_s * g_sr + cfg.n0)
        outages += int(np.count_nonzero(gamma_tr < gamma0))
        done += m
    p = outages / n_samples
    return p, math.sqrt(max(p * (1.0 - p), 0.0) / n_samples)


def sinr(p_tx: float, h_main: complex, p_int: float, h_int: complex, n0: float) -> float:
    """p_tx*|h_main|^2 / (p_int*|h_int|^2 + n0)."""
    denom = p_int * abs(h_int) ** 2 + n0
    if denom == 0.0:
        raise DegenerateDenominator("interference power + noise is zero")
    return p_tx * abs(h_main) ** 2 / denom


def secrecy_rate(gamma_d: float, gamma_e: float) -> float:
    """max(log2((1+gamma_d)/(1+gamma_e)), 0)."""
    return max(math.log2((1.0 + gamma_d) / (1.0 + gamma_e)), 0.0)


def transmitter_secrecy_rates(cfg: SystemConfig, p_s: float,
                              real: ChannelRealization) -> np.ndarray:
    """Secrecy rate of every transmitter's wiretap pair for one realization."""
    gamma_d = p_s * np.abs(real.h_sd) ** 2 / (cfg.p_t * abs(real.h_td) ** 2 + cfg.n0)
    gamma_e = p_s * np.abs(real.h_se) ** 2 / (cfg.p_t * abs(real.h_te) ** 2 + cfg.n0)
    return np.maximum(np.log2((1.0 + gamma_d) / (1.0 + gamma_e)), 0.0)


def batch_secrecy_rates(cfg: SystemConfig, p_s: float, batch: ChannelBatch) -> np.ndarray:
    """(n, K) secrecy rates for a channel batch."""
    denom_d = cfg.p_t * np.abs(batch.h_td) ** 2 + cfg.n0
    denom_e = cfg.p_t * np.abs(batch.h_te) ** 2 + cfg.n0
    gamma_d = p_s * np.abs(batch.h_sd) ** 2 / denom_d[:, None]
    gamma_e = p_s * np.abs(batch.h_se) ** 2 / denom_e[:, None]
    return np.maximum(np.log2((1.0 + gamma_d) / (1.0 + gamma_e)), 0.0)

"""
Per-tone SINR, per-hop conditional mutual information and end-to-end mutual
information of fixed-rate and rate-adaptive decode-and-forward relaying.

All quantities are in nats/s/Hz. Functions are pure and accept arrays with
arbitrary leading batch axes; the hop, interferer and tone axes are trailing.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from network.channel import ToneGrid
from network.topology import NetworkConfig, ReusePlan

logger = logging.getLogger(__name__)

ORACLE_MAX_PHASES = 3


@dataclass(frozen=True)
class LinkRates:
    """
    Rates of one realization (or a batch of them).

    sinr, zeta: (..., N, W); hop_mi: (..., K, M) with [k-1, m-1] = I_{k,m};
    ts_weights: (..., K); e2e_fixed, e2e_adaptive: (...); zero_bottleneck marks
    realizations where some phase bottleneck is exactly zero.
    """

    sinr: np.ndarray
    zeta: np.ndarray
    hop_mi: np.ndarray
    ts_weights: np.ndarray
    e2e_fixed: np.ndarray
    e2e_adaptive: np.ndarray
    zero_bottleneck: np.ndarray


def interference_load(cfg: NetworkConfig, plan: ReusePlan, tones: ToneGrid, snr: float) -> np.ndarray:
    """
    Aggregate intra-route interference over noise, per hop and tone.

    Each of the M = N/K simultaneous transmitters radiates P_i = P/(M·W) per
    tone and the per-tone noise power is N0·B/W, so interferer l adds
    (P/(M·W))·f_{n,l}^{-p}·|G_{n,l,w}|^2 / (N0·B/W) = (snr/M)·f^{-p}·|G|^2.
    With 1/M = K/N:

        zeta_{n,w} = (snr·K/N) · sum_{l in L_n} f_{n,l}^{-p} |G_{n,l,w}|^2

    which vanishes linearly as snr -> 0 and is identically zero for K = N.
    """
    weights = plan.interferer_distances() ** (-cfg.pathloss_exp)  # (N, M-1)
    received = np.abs(tones.interference_tones) ** 2  # (..., N, M-1, W)
    aggregate = np.sum(weights[..., None] * received, axis=-2)
    return (snr * cfg.reuse_sep / cfg.n_hops) * aggregate


def sinr_grid(cfg: NetworkConfig, plan: ReusePlan, tones: ToneGrid, snr: float, zeta: np.ndarray = None) -> np.ndarray:
    """
    SINR_{n,w} = N^{p-1}·K·|H_{n,w}|^2·snr / D^p · (1 + zeta_{n,w})^{-1}.

    `zeta` is recomputed through `interference_load` when not supplied.
    """
    if zeta is None:
        zeta = interference_load(cfg, plan, tones, snr)
    return cfg.snr_gain * np.abs(tones.signal_tones) ** 2 * snr / (1.0 + zeta)


def hop_mutual_info(sinr: np.ndarray) -> np.ndarray:
    """(1/W)·sum_w ln(1 + SINR_w) along the trailing tone axis."""
    return np.mean(np.log1p(sinr), axis=-1)


def e2e_fixed_rate(hop_mi: np.ndarray, reuse_sep: int) -> np.ndarray:
    """Equal time-sharing, fixed rate: (1/K)·min_n I_n over the trailing hop axis."""
    return np.min(hop_mi, axis=-1) / reuse_sep


def phase_bottlenecks(hop_mi_by_phase: np.ndarray) -> np.ndarray:
    """min_m I_{k,m} for every phase; input (..., K, M), output (..., K)."""
    return np.min(hop_mi_by_phase, axis=-1)


def e2e_rate_adaptive(hop_mi_by_phase: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Optimal time-sharing with rate adaptation.

    I = (sum_k 1/b_k)^{-1} with b_k = min_m I_{k,m}, attained by
    lambda_k = (1/b_k)/sum_j (1/b_j), which equalizes lambda_k·b_k across phases.
    A zero bottleneck gives I = 0 with uniform weights and raises the returned flag.

    Evaluated as b_min / sum_k (b_min/b_k): every ratio is at most 1, so the
    result is never below the fixed-rate value b_min/K, not even by rounding.

    :return: (value, ts_weights, zero_bottleneck)
    """
    bottleneck = phase_bottlenecks(np.asarray(hop_mi_by_phase, dtype=float))
    n_phases = bottleneck.shape[-1]
    zero = np.any(bottleneck <= 0.0, axis=-1)
    safe = np.where(zero[..., None], 1.0, bottleneck)
    smallest = np.min(safe, axis=-1)
    ratios = smallest[..., None] / safe
    total = np.sum(ratios, axis=-1)
    value = np.where(zero, 0.0, smallest / total)
    weights = np.where(zero[..., None], 1.0 / n_phases, ratios / total[..., None])
    if np.any(zero):
        logger.warning("Zero phase bottleneck in %d realization(s); end-to-end rate set to 0.", int(np.sum(zero)))
    return value, weights, zero


def e2e_maxmin_oracle(bottlenecks: np.ndarray, step: float = 1e-4) -> float:
    """
    Brute-force max over the simplex grid of min_k lambda_k·b_k.

    Used to cross-check `e2e_rate_adaptive`; limited to K <= 3.
    """
    b = np.asarray(bottlenecks, dtype=float).ravel()
    n_phases = b.size
    if n_phases < 1 or n_phases > ORACLE_MAX_PHASES:
        raise ValueError(f"Oracle supports 1 <= K <= {ORACLE_MAX_PHASES}, got K = {n_phases}.")
    if n_phases == 1:
        return float(b[0])
    grid = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    if n_phases == 2:
        return float(np.max(np.minimum(grid * b[0], (1.0 - grid) * b[1])))
    best = 0.0
    for lam1 in grid:
        lam2 = grid[grid <= 1.0 - lam1 + 1e-15]
        lam3 = np.clip(1.0 - lam1 - lam2, 0.0, None)
        row = np.minimum(np.minimum(lam1 * b[0], lam2 * b[1]), lam3 * b[2])
        best = max(best, float(np.max(row)))
    return best


def compute_link_rates(cfg: NetworkConfig, plan: ReusePlan, tones: ToneGrid, snr: float = None) -> LinkRates:
    """Evaluates every per-tone, per-hop and end-to-end rate of `tones` at `snr` (default cfg.snr)."""
    snr = cfg.snr if snr is None else snr
    zeta = interference_load(cfg, plan, tones, snr)
    sinr = sinr_grid(cfg, plan, tones, snr, zeta=zeta)
    per_hop = hop_mutual_info(sinr)
    by_phase = plan.group_by_phase(per_hop)
    fixed = e2e_fixed_rate(per_hop, cfg.reuse_sep)
    adaptive, weights, zero = e2e_rate_adaptive(by_phase)
    return LinkRates(
        sinr=sinr,
        zeta=zeta,
        hop_mi=by_phase,
        ts_weights=weights,
        e2e_fixed=fixed,
        e2e_adaptive=adaptive,
        zero_bottleneck=zero,
    )

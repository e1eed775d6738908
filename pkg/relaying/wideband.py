"""
Power-bandwidth tradeoff of the two relaying strategies.

Eb/N0 is energy per information bit over noise spectral level, so with the
rate I in nats/s/Hz, Eb/N0(snr) = snr·ln2 / I(snr). Eb/N0-min is available in
closed form from the per-hop channel powers and, independently, as a numeric
low-SNR limit of a frozen realization's I(snr).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Union

import numpy as np
import pandas as pd

from config import settings
from network.channel import ToneGrid
from network.topology import NetworkConfig, ReusePlan
from relaying.linkmath import compute_link_rates
from utils.exception_handler import ExceptionHandler, NumericalLimitError
from utils.helpers import Helpers

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
STRATEGIES = ("fixed", "adaptive")
CLOSED_FORM = "closed-form"
NUMERIC_LIMIT = "numeric-limit"

MiEvaluator = Callable[[float], float]


@dataclass(frozen=True)
class EvtFit:
    """
    Type III (Weibull-type) law of the minimum channel power beta_N:
    P(beta_N <= x) ~ 1 - exp(-((x - b_n)/a_n)^shape).

    When the fit did not converge, `converged` is False and `raw_quantiles`
    carries the empirical quantiles instead.
    """

    family: str
    shape: float
    a_n: float
    b_n: float
    ks_distance: float
    converged: bool = True
    n_samples: int = 0
    raw_quantiles: Dict[float, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.converged:
            if not 0.0 <= self.ks_distance <= 1.0:
                raise ValueError(f"KS distance must lie in [0, 1], got {self.ks_distance}.")
            if self.family in ("Type II", "Type III") and not self.shape > 0:
                raise ValueError(f"{self.family} fit needs a positive shape, got {self.shape}.")

    def quantile(self, p: float) -> float:
        """a_n·mu^{-1}(p) + b_n with mu the standard Type III law."""
        if not self.converged:
            raise ValueError("No fitted law available; use the raw quantiles.")
        return self.a_n * (-math.log1p(-p)) ** (1.0 / self.shape) + self.b_n


@dataclass(frozen=True)
class OutageEnergy:
    """Outage-constrained Eb/N0-min and the beta_N quantile it was computed from."""

    value: float
    quantile: float
    mode: str
    flagged: bool = False

    @property
    def value_db(self) -> float:
        return Helpers.to_db(self.value)


@dataclass(frozen=True)
class WidebandMetrics:
    """
    Wideband summary of one frozen realization under one relaying strategy.

    `ebn0_min` holds the value named by `method_tag`; both estimates are kept.
    `curve` has columns snr, I, I_bits, ebn0, ebn0_db.
    """

    strategy: str
    ebn0_min: float
    ebn0_min_closed: float
    ebn0_min_numeric: float
    s0_closed: float
    s0_numeric: float
    curve: pd.DataFrame
    method_tag: str = CLOSED_FORM
    argmin_mismatch: bool = False
    limit_diagnostics: Dict[str, dict] = field(default_factory=dict)

    @property
    def ebn0_min_db(self) -> float:
        return Helpers.to_db(self.ebn0_min)

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "method": self.method_tag,
            "ebn0_min": self.ebn0_min,
            "ebn0_min_db": self.ebn0_min_db,
            "ebn0_min_closed": self.ebn0_min_closed,
            "ebn0_min_numeric": self.ebn0_min_numeric,
            "s0_closed": self.s0_closed,
            "s0_numeric": self.s0_numeric,
            "argmin_mismatch": self.argmin_mismatch,
            "limit_diagnostics": self.limit_diagnostics,
        }


def _scalar_or_array(values: np.ndarray):
    return float(values) if np.ndim(values) == 0 else values


def energy_scale(cfg: NetworkConfig) -> float:
    """D^p / N^{p-1}: Eb/N0 of a unit-power bottleneck, divided by ln2."""
    return cfg.reuse_sep / cfg.snr_gain


def ebn0_min_fixed_closed(cfg: NetworkConfig, hop_powers: np.ndarray):
    """
    Eb/N0-min of fixed-rate relaying with equal time-sharing,

        ln2 · D^p / (N^{p-1} · min_n beta_n),

    from per-hop powers beta_n = (1/W)·sum_w |H_{n,w}|^2 (trailing axis of length N).
    The 1/K time-sharing factor of the end-to-end rate cancels the K of the
    per-hop SNR gain. A zero hop power gives an infinite result and a warning.
    """
    worst = np.min(np.asarray(hop_powers, dtype=float), axis=-1)
    zero = worst <= 0.0
    value = np.where(zero, np.inf, LN2 * energy_scale(cfg) / np.where(zero, 1.0, worst))
    if np.any(zero):
        logger.warning("Zero hop power in %d realization(s); fixed-rate Eb/N0-min is infinite.", int(np.sum(zero)))
    return _scalar_or_array(value)


def phase_bottleneck_powers(plan: ReusePlan, hop_powers: np.ndarray) -> np.ndarray:
    """min_m beta_{(m-1)K+k} for every phase: (..., N) -> (..., K)."""
    return np.min(plan.group_by_phase(np.asarray(hop_powers, dtype=float)), axis=-1)


def ebn0_min_adaptive_closed(cfg: NetworkConfig, bottleneck_powers: np.ndarray):
    """
    Eb/N0-min of rate-adaptive relaying with optimal time-sharing,

        D^p / (N^{p-1}·K) · sum_k ln2 / min_m beta_{(m-1)K+k},

    from the K phase bottleneck powers (trailing axis).
    """
    bottleneck = np.asarray(bottleneck_powers, dtype=float)
    zero = np.any(bottleneck <= 0.0, axis=-1)
    inverse = 1.0 / np.where(bottleneck > 0.0, bottleneck, 1.0)
    value = np.where(zero, np.inf, LN2 * np.sum(inverse, axis=-1) / cfg.snr_gain)
    if np.any(zero):
        logger.warning("Zero bottleneck power in %d realization(s); adaptive Eb/N0-min is infinite.", int(np.sum(zero)))
    return _scalar_or_array(value)


@dataclass(frozen=True)
class FrozenChannelRate:
    """
    End-to-end I(snr) of one frozen realization; interference is recomputed at every snr.

    `snr_gain` maps the end-to-end snr to the per-hop SNR scale N^{p-1}·K/D^p.
    """

    cfg: NetworkConfig
    plan: ReusePlan
    tones: ToneGrid
    strategy: str

    @property
    def snr_gain(self) -> float:
        return self.cfg.snr_gain

    def __call__(self, snr: float) -> float:
        rates = compute_link_rates(self.cfg, self.plan, self.tones, snr)
        return float(rates.e2e_fixed if self.strategy == "fixed" else rates.e2e_adaptive)


def make_mi_evaluator(cfg: NetworkConfig, plan: ReusePlan, tones: ToneGrid, strategy: str) -> FrozenChannelRate:
    if strategy not in STRATEGIES:
        raise ValueError(f"Unknown strategy '{strategy}', expected one of {STRATEGIES}.")
    return FrozenChannelRate(cfg, plan, tones, strategy)


def default_probe_snr(evaluator: MiEvaluator) -> float:
    """
    End-to-end snr at which PROBE_SNR is reached per hop. Plain callables
    without an `snr_gain` are probed at PROBE_SNR directly.
    """
    return settings.PROBE_SNR / getattr(evaluator, "snr_gain", 1.0)


def _probe(evaluator: MiEvaluator, probe_snr: float, step_ratio: float) -> Dict[str, float]:
    step = probe_snr * step_ratio
    below, at, above = evaluator(probe_snr - step), evaluator(probe_snr), evaluator(probe_snr + step)
    first = (above - below) / (2.0 * step)
    second = (above - 2.0 * at + below) / step ** 2
    return {
        "probe_snr": probe_snr,
        "step": step,
        "I_below": below,
        "I_at": at,
        "I_above": above,
        "first_derivative": first,
        "second_derivative": second,
        # Linear extrapolation of the slope back to snr = 0.
        "slope_at_zero": first - probe_snr * second,
    }


def ebn0_min_numeric(evaluator: MiEvaluator, probe_snr: float = None, step_ratio: float = None) -> float:
    """
    ln2 / dI/dsnr at snr -> 0, from central differences around `probe_snr`.

    :raises NumericalLimitError: if the slope estimate is not finite and positive.
    """
    probe_snr = default_probe_snr(evaluator) if probe_snr is None else probe_snr
    step_ratio = settings.PROBE_STEP_RATIO if step_ratio is None else step_ratio
    diagnostics = _probe(evaluator, probe_snr, step_ratio)
    slope = diagnostics["slope_at_zero"]
    if not np.isfinite(slope) or slope <= 0.0:
        raise NumericalLimitError("Low-SNR slope estimate is not finite and positive.", diagnostics)
    return LN2 / slope


def s0_numeric(evaluator: MiEvaluator, probe_snr: float = None, step_ratio: float = None) -> float:
    """
    Wideband slope 2·(dI)^2 / (-d2I) at the probe point, in b/s/Hz/(3 dB).

    :raises NumericalLimitError: if the curvature estimate is not negative.
    """
    probe_snr = default_probe_snr(evaluator) if probe_snr is None else probe_snr
    step_ratio = settings.PROBE_STEP_RATIO if step_ratio is None else step_ratio
    diagnostics = _probe(evaluator, probe_snr, step_ratio)
    slope, curvature = diagnostics["slope_at_zero"], diagnostics["second_derivative"]
    if not np.isfinite(slope) or not np.isfinite(curvature) or curvature >= 0.0:
        raise NumericalLimitError("Second-derivative estimate is not negative at the probe SNR.", diagnostics)
    return 2.0 * slope ** 2 / (-curvature)


def s0_closed(cfg: NetworkConfig) -> float:
    """2/K, shared by both strategies."""
    return 2.0 / cfg.reuse_sep


def ebn0_curve(evaluator: MiEvaluator, snr_grid) -> pd.DataFrame:
    """Samples (I, Eb/N0) along `snr_grid`; Eb/N0 is infinite where I = 0."""
    snr = np.asarray(snr_grid, dtype=float)
    rates = np.array([evaluator(s) for s in snr])
    with np.errstate(divide="ignore"):
        ebn0 = np.where(rates > 0.0, snr * LN2 / np.where(rates > 0.0, rates, 1.0), np.inf)
        ebn0_db = 10.0 * np.log10(ebn0)
    return pd.DataFrame(
        {
            "snr": snr,
            "I": rates,
            "I_bits": Helpers.nats_to_bits(rates),
            "ebn0": ebn0,
            "ebn0_db": ebn0_db,
        }
    )


def affine_ebn0_db(ebn0_min: float, s0: float, rate_bits):
    """First-order expansion 10log10(Eb/N0-min) + (I/S0)·10log10(2) in the rate (bits)."""
    return Helpers.to_db(ebn0_min) + np.asarray(rate_bits, dtype=float) / s0 * Helpers.to_db(2.0)


def argmin_mismatch(cfg: NetworkConfig, plan: ReusePlan, tones: ToneGrid, strategy: str, probe_snr: float = None) -> bool:
    """
    True if the hop selected by the minimum at the probe SNR differs from the one
    selected by channel power, which the closed forms assume.
    """
    probe_snr = settings.PROBE_SNR / cfg.snr_gain if probe_snr is None else probe_snr
    rates = compute_link_rates(cfg, plan, tones, probe_snr)
    by_power = plan.group_by_phase(tones.hop_power)
    if strategy == "fixed":
        mismatch = np.argmin(rates.hop_mi.reshape(-1)) != np.argmin(by_power.reshape(-1))
    else:
        mismatch = np.any(np.argmin(rates.hop_mi, axis=-1) != np.argmin(by_power, axis=-1))
    return bool(mismatch)


def _limit_or_nan(estimator: Callable[[MiEvaluator], float], evaluator: MiEvaluator, name: str, strategy: str):
    """Runs a numeric limit estimator; an unusable estimate becomes NaN plus its probe values."""
    try:
        return estimator(evaluator), {}
    except NumericalLimitError as e:
        ExceptionHandler.suppress_exceptions(e, f"numeric {name} ({strategy} strategy)")
        return math.nan, {name: e.diagnostics}


def wideband_metrics(
    cfg: NetworkConfig,
    plan: ReusePlan,
    tones: ToneGrid,
    strategy: str,
    snr_grid=None,
    method: str = CLOSED_FORM,
) -> WidebandMetrics:
    """
    Closed-form and numeric Eb/N0-min, both wideband slopes and the Eb/N0 curve
    of one frozen realization.
    """
    if method not in (CLOSED_FORM, NUMERIC_LIMIT):
        raise ValueError(f"Unknown method '{method}'.")
    evaluator = make_mi_evaluator(cfg, plan, tones, strategy)
    if strategy == "fixed":
        closed = ebn0_min_fixed_closed(cfg, tones.hop_power)
    else:
        closed = ebn0_min_adaptive_closed(cfg, phase_bottleneck_powers(plan, tones.hop_power))
    numeric, diagnostics = _limit_or_nan(ebn0_min_numeric, evaluator, "Eb/N0-min", strategy)
    slope, slope_diagnostics = _limit_or_nan(s0_numeric, evaluator, "wideband slope", strategy)
    diagnostics.update(slope_diagnostics)

    mismatch = argmin_mismatch(cfg, plan, tones, strategy)
    if mismatch:
        logger.warning("Bottleneck hop at the probe SNR differs from the weakest-channel hop (%s strategy).", strategy)

    if snr_grid is None:
        snr_grid = np.logspace(-8, 1, 46) / cfg.snr_gain
    curve = ebn0_curve(evaluator, snr_grid)
    return WidebandMetrics(
        strategy=strategy,
        ebn0_min=closed if method == CLOSED_FORM else numeric,
        ebn0_min_closed=closed,
        ebn0_min_numeric=numeric,
        s0_closed=s0_closed(cfg),
        s0_numeric=slope,
        curve=curve,
        method_tag=method,
        argmin_mismatch=mismatch,
        limit_diagnostics=diagnostics,
    )


def ebn0_min_outage(
    source: Union[EvtFit, np.ndarray],
    p_out: float,
    cfg: NetworkConfig,
    mode: Optional[str] = None,
) -> OutageEnergy:
    """
    Outage-constrained Eb/N0-min of fixed-rate relaying,

        ln2 · D^p / (N^{p-1} · q(p_out)),

    where q is the p_out-quantile of beta_N = min_n beta_n, taken from a Type III
    fit ("evt") or directly from beta_N samples ("empirical", inverted-CDF quantile).
    A nonpositive quantile gives an infinite, flagged result.
    """
    if not 0.0 < p_out < 1.0:
        raise ValueError(f"p_out must lie in (0, 1), got {p_out}.")
    if mode is None:
        mode = "evt" if isinstance(source, EvtFit) else "empirical"

    if mode == "evt":
        if not isinstance(source, EvtFit):
            raise ValueError("EVT mode needs an EvtFit source.")
        if source.converged:
            quantile = source.quantile(p_out)
        elif p_out in source.raw_quantiles:
            quantile = source.raw_quantiles[p_out]
        else:
            raise ValueError(f"Fit did not converge and no raw quantile covers p_out = {p_out}.")
    elif mode == "empirical":
        samples = np.asarray(source, dtype=float).ravel()
        if samples.size == 0:
            raise ValueError("Empirical mode needs at least one beta_N sample.")
        quantile = float(np.quantile(samples, p_out, method="inverted_cdf"))
    else:
        raise ValueError(f"Unknown quantile mode '{mode}'.")

    if not quantile > 0.0:
        logger.warning("Nonpositive beta_N quantile %.6g at p_out = %g; outage Eb/N0-min is infinite.", quantile, p_out)
        return OutageEnergy(value=math.inf, quantile=quantile, mode=mode, flagged=True)
    return OutageEnergy(value=LN2 * energy_scale(cfg) / quantile, quantile=quantile, mode=mode)

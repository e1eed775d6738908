import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import expon

from config import settings
from network.channel import (
    NORMALIZATION_NOTES,
    ChannelRealization,
    PowerSampler,
    draw_realization,
    hop_power_sampler,
    tones_from_taps,
    trial_rng,
)
from network.topology import NetworkConfig, ReusePlan, build_reuse_plan
from performance.metrics import (
    EnsembleMetrics,
    OutageEstimate,
    empirical_cdf,
    empirical_quantile,
    fit_type_iii,
    ks_distance,
    quantile_grid,
)
from relaying.linkmath import compute_link_rates
from relaying.wideband import (
    LN2,
    EvtFit,
    ebn0_min_adaptive_closed,
    ebn0_min_fixed_closed,
    energy_scale,
    phase_bottleneck_powers,
)
from utils.exception_handler import ConfigurationError
from utils.helpers import Helpers

logger = logging.getLogger(__name__)

RealizationFactory = Callable[[NetworkConfig, ReusePlan, np.random.Generator], ChannelRealization]

MAX_SEED = 2 ** 64
STRATEGIES = ("fixed", "adaptive")


@dataclass(frozen=True)
class McConfig:
    """
    Monte Carlo run parameters.

    :param trials: Number of independent channel realizations.
    :param seed: 64-bit root seed; trial t draws from the stream (seed, t).
    :param target_rate: Target rate R for outage, nats/s/Hz.
    :param cdf_grid: Strictly increasing CDF evaluation points, or None for an automatic quantile grid.
    """

    trials: int = settings.DEFAULT_TRIALS
    seed: int = 0
    target_rate: float = settings.DEFAULT_TARGET_RATE
    cdf_grid: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if isinstance(self.trials, bool) or not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ConfigurationError("trials", "must be a positive integer")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < MAX_SEED:
            raise ConfigurationError("seed", "must be an integer in [0, 2^64)")
        if not np.isfinite(self.target_rate) or self.target_rate < 0:
            raise ConfigurationError("target_rate", "must be a nonnegative real")
        if self.cdf_grid is not None:
            grid = np.asarray(self.cdf_grid, dtype=float)
            if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
                raise ConfigurationError("cdf_grid", "must be a strictly increasing list")
            object.__setattr__(self, "cdf_grid", tuple(float(x) for x in grid))

    def to_dict(self) -> dict:
        return {
            "trials": int(self.trials),
            "seed": int(self.seed),
            "target_rate": float(self.target_rate),
            "cdf_grid": None if self.cdf_grid is None else list(self.cdf_grid),
        }


@dataclass
class TrialBatch:
    """
    Per-trial outputs of a contiguous block of trials [start, start + size).

    beta_min is min_n of the per-hop channel power; inverse_bottleneck is the
    mean over phases of 1/min_m of the per-hop channel power.
    """

    start: int
    e2e_fixed: np.ndarray
    e2e_adaptive: np.ndarray
    ebn0_fixed: np.ndarray
    ebn0_adaptive: np.ndarray
    beta_min: np.ndarray
    inverse_bottleneck: np.ndarray
    zero_bottleneck: int = 0

    @property
    def size(self) -> int:
        return int(self.e2e_fixed.shape[0])

    @classmethod
    def merge(cls, batches: Iterable["TrialBatch"]) -> "TrialBatch":
        """Concatenates batches in trial order; the result does not depend on input order."""
        ordered = sorted(batches, key=lambda b: b.start)
        if not ordered:
            raise ValueError("Nothing to merge.")
        return cls(
            start=ordered[0].start,
            e2e_fixed=np.concatenate([b.e2e_fixed for b in ordered]),
            e2e_adaptive=np.concatenate([b.e2e_adaptive for b in ordered]),
            ebn0_fixed=np.concatenate([b.ebn0_fixed for b in ordered]),
            ebn0_adaptive=np.concatenate([b.ebn0_adaptive for b in ordered]),
            beta_min=np.concatenate([b.beta_min for b in ordered]),
            inverse_bottleneck=np.concatenate([b.inverse_bottleneck for b in ordered]),
            zero_bottleneck=sum(b.zero_bottleneck for b in ordered),
        )

    def rates(self) -> Dict[str, np.ndarray]:
        return {"fixed": self.e2e_fixed, "adaptive": self.e2e_adaptive}

    def energies(self) -> Dict[str, np.ndarray]:
        return {"fixed": self.ebn0_fixed, "adaptive": self.ebn0_adaptive}


@dataclass(frozen=True)
class ChiEstimate:
    """Monte Carlo estimate of E[1/min_m beta_m] with its standard error."""

    value: float
    stderr: float
    integrability: str
    n_samples: int


@dataclass
class McSummary:
    """Aggregated ensemble statistics; `batch` keeps the per-trial samples."""

    cdf: pd.DataFrame
    statistics: Dict[str, dict]
    p_out: Dict[str, OutageEstimate]
    ebn0_min: Dict[str, dict]
    chi: ChiEstimate
    evt: EvtFit
    dominance: bool
    flags: Dict[str, int]
    n_trials: int
    metadata: dict = field(default_factory=dict)
    batch: Optional[TrialBatch] = None

    @property
    def chi_estimate(self) -> float:
        return self.chi.value

    def as_dict(self) -> dict:
        """JSON-ready summary without per-trial samples or the CDF table."""
        return {
            "n_trials": self.n_trials,
            "statistics": self.statistics,
            "p_out": {name: vars(est) for name, est in self.p_out.items()},
            "ebn0_min": self.ebn0_min,
            "chi": vars(self.chi),
            "evt": {
                "family": self.evt.family,
                "shape": self.evt.shape,
                "a_n": self.evt.a_n,
                "b_n": self.evt.b_n,
                "ks_distance": self.evt.ks_distance,
                "converged": self.evt.converged,
                "raw_quantiles": {str(p): q for p, q in self.evt.raw_quantiles.items()},
            },
            "dominance": self.dominance,
            "flags": self.flags,
            "metadata": self.metadata,
        }


def integrability_label(small_power_exponent: Optional[int]) -> str:
    """
    Classifies E[1/beta] from the exponent e of P(beta <= x) ~ c·x^e near zero:
    divergent for e <= 1, infinite variance for e = 2, finite otherwise.
    The minimum over M slots keeps the same exponent.
    """
    if small_power_exponent is None:
        return "unknown"
    if small_power_exponent <= 1:
        return "divergent"
    if small_power_exponent == 2:
        return "infinite-variance"
    return "finite"


def _warn_integrability(label: str):
    if label == "divergent":
        logger.warning(
            "Per-hop channel power has positive density at zero: chi is infinite and the estimate diverges with sample size."
        )
    elif label == "infinite-variance":
        logger.warning("chi is finite but its estimator has infinite variance; the standard error is unreliable.")


def _energy_summary(values: np.ndarray) -> dict:
    finite = values[np.isfinite(values)]
    summary = {"non_finite": int(values.size - finite.size)}
    if finite.size == 0:
        summary.update({"mean": math.inf, "median": math.inf, "q10": math.inf, "q90": math.inf, "median_db": math.inf})
        return summary
    median = empirical_quantile(finite, 0.5)
    summary.update(
        {
            "mean": float(np.mean(finite)),
            "median": median,
            "q10": empirical_quantile(finite, 0.1),
            "q90": empirical_quantile(finite, 0.9),
            "median_db": Helpers.to_db(median),
        }
    )
    return summary


class MonteCarloEngine:
    """
    Seeded trial ensemble over one scenario.

    Trials are evaluated in fixed-size chunks on a thread pool; each chunk is a
    vectorized pass over stacked realizations. Chunk boundaries do not depend on
    the worker count, so results are identical for any degree of parallelism.
    """

    def __init__(
        self,
        cfg: NetworkConfig,
        mc: McConfig,
        workers: Optional[int] = None,
        realization_factory: RealizationFactory = draw_realization,
        chunk_size: Optional[int] = None,
    ):
        """
        :param cfg: Scenario.
        :param mc: Run parameters.
        :param workers: Thread count (defaults to settings.MAX_WORKERS).
        :param realization_factory: (cfg, plan, rng) -> ChannelRealization; the injection point for
            deterministic channels.
        :param chunk_size: Trials per chunk (defaults to settings.TRIAL_CHUNK_SIZE).
        """
        self.cfg = cfg
        self.mc = mc
        self.plan = build_reuse_plan(cfg)
        self.workers = workers or settings.MAX_WORKERS
        self.realization_factory = realization_factory
        self.chunk_size = chunk_size or settings.TRIAL_CHUNK_SIZE
        if self.workers < 1 or self.chunk_size < 1:
            raise ConfigurationError("workers", "worker count and chunk size must be positive")

    def _chunks(self) -> List[Tuple[int, int]]:
        return [(s, min(s + self.chunk_size, self.mc.trials)) for s in range(0, self.mc.trials, self.chunk_size)]

    def run_chunk(self, start: int, stop: int) -> TrialBatch:
        """Evaluates trials start .. stop-1."""
        cfg, plan = self.cfg, self.plan
        realizations = [self.realization_factory(cfg, plan, trial_rng(self.mc.seed, t)) for t in range(start, stop)]
        tones = tones_from_taps(ChannelRealization.stack(realizations), cfg.n_tones)
        rates = compute_link_rates(cfg, plan, tones)
        bottleneck = phase_bottleneck_powers(plan, tones.hop_power)
        safe = np.where(bottleneck > 0.0, bottleneck, np.nan)
        logger.debug("Chunk [%d, %d) evaluated", start, stop)
        return TrialBatch(
            start=start,
            e2e_fixed=np.asarray(rates.e2e_fixed, dtype=float),
            e2e_adaptive=np.asarray(rates.e2e_adaptive, dtype=float),
            ebn0_fixed=np.asarray(ebn0_min_fixed_closed(cfg, tones.hop_power), dtype=float),
            ebn0_adaptive=np.asarray(ebn0_min_adaptive_closed(cfg, bottleneck), dtype=float),
            beta_min=np.min(tones.hop_power, axis=-1),
            inverse_bottleneck=np.mean(1.0 / safe, axis=-1),
            zero_bottleneck=int(np.sum(rates.zero_bottleneck)),
        )

    def run(self) -> TrialBatch:
        """Runs every chunk and merges them in trial order."""
        logger.info(
            "Running %d trials (N=%d, K=%d, W=%d, V=%d) on %d worker(s)",
            self.mc.trials, self.cfg.n_hops, self.cfg.reuse_sep, self.cfg.n_tones, self.cfg.n_taps, self.workers,
        )
        results: Dict[int, TrialBatch] = {}
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            futures = {executor.submit(self.run_chunk, start, stop): start for start, stop in self._chunks()}
            for future in as_completed(futures):
                start = futures[future]
                try:
                    results[start] = future.result()
                except Exception as e:
                    logger.error(f"Error in trial chunk starting at {start}: {e}")
                    raise
        return TrialBatch.merge(results.values())

    def summarize(self, batch: TrialBatch) -> McSummary:
        """Builds the McSummary of a merged batch."""
        rates = batch.rates()
        metrics = EnsembleMetrics(rates, self.mc.target_rate)
        grid = (
            np.asarray(self.mc.cdf_grid)
            if self.mc.cdf_grid is not None
            else quantile_grid(rates.values(), settings.CDF_GRID_POINTS)
        )
        cdf = pd.DataFrame(
            {
                "value": grid,
                "cdf_fixed": empirical_cdf(rates["fixed"], grid),
                "cdf_adaptive": empirical_cdf(rates["adaptive"], grid),
            }
        )

        inverse = batch.inverse_bottleneck[np.isfinite(batch.inverse_bottleneck)]
        label = integrability_label(self.cfg.n_taps)
        chi = ChiEstimate(
            value=float(np.mean(inverse)) if inverse.size else math.inf,
            stderr=float(np.std(inverse, ddof=1) / math.sqrt(inverse.size)) if inverse.size > 1 else math.nan,
            integrability=label,
            n_samples=int(inverse.size),
        )

        energies = batch.energies()
        flags = {
            "zero_bottleneck": batch.zero_bottleneck,
            "non_finite_ebn0_fixed": int(np.sum(~np.isfinite(energies["fixed"]))),
            "non_finite_ebn0_adaptive": int(np.sum(~np.isfinite(energies["adaptive"]))),
        }
        dominance = metrics.check_dominance("fixed", "adaptive")
        if not dominance:
            logger.warning("Fixed-rate mutual information exceeded the rate-adaptive value in some trial.")

        return McSummary(
            cdf=cdf,
            statistics=metrics.calculate_metrics_summary(),
            p_out={name: metrics.calculate_outage(name) for name in STRATEGIES},
            ebn0_min={name: _energy_summary(energies[name]) for name in STRATEGIES},
            chi=chi,
            evt=fit_type_iii(batch.beta_min),
            dominance=dominance,
            flags=flags,
            n_trials=batch.size,
            metadata={
                "config": self.cfg.to_dict(),
                "mc": self.mc.to_dict(),
                "normalization": dict(NORMALIZATION_NOTES),
                "chi_integrability": label,
            },
            batch=batch,
        )


def run_ensemble(
    cfg: NetworkConfig,
    mc: McConfig,
    workers: Optional[int] = None,
    realization_factory: RealizationFactory = draw_realization,
) -> McSummary:
    """
    Draws `mc.trials` realizations, evaluates both relaying strategies at cfg.snr
    and aggregates them. Trial t depends only on (mc.seed, t).
    """
    engine = MonteCarloEngine(cfg, mc, workers=workers, realization_factory=realization_factory)
    summary = engine.summarize(engine.run())
    logger.info(
        "Ensemble done: mean I fixed=%.6g, adaptive=%.6g nats/s/Hz",
        summary.statistics["fixed"]["mean"], summary.statistics["adaptive"]["mean"],
    )
    return summary


def estimate_chi(
    cfg: NetworkConfig,
    trials: int,
    seed: int = 0,
    power_sampler: Optional[PowerSampler] = None,
    small_power_exponent: Optional[int] = None,
) -> ChiEstimate:
    """
    Estimates chi = E[1/min_{m=1..M} beta_m] over independent M-tuples of per-hop powers.

    :param cfg: Scenario; only M = N/K and the channel law are used.
    :param trials: Number of M-tuples.
    :param power_sampler: Overrides the channel law of `cfg`.
    :param small_power_exponent: Exponent of the power CDF near zero for the integrability
        label; defaults to V when the channel law of `cfg` is used.
    """
    if power_sampler is None:
        power_sampler = hop_power_sampler(cfg)
        if small_power_exponent is None:
            small_power_exponent = cfg.n_taps
    label = integrability_label(small_power_exponent)
    _warn_integrability(label)

    powers = power_sampler(trial_rng(seed, 0), (int(trials), cfg.n_slots))
    inverse = 1.0 / np.min(powers, axis=-1)
    stderr = float(np.std(inverse, ddof=1) / math.sqrt(inverse.size)) if inverse.size > 1 else math.nan
    estimate = ChiEstimate(value=float(np.mean(inverse)), stderr=stderr, integrability=label, n_samples=int(inverse.size))
    logger.info("chi estimate %.6g +/- %.2g (M=%d, %d samples, %s)", estimate.value, stderr, cfg.n_slots, trials, label)
    return estimate


@dataclass
class EvtReport:
    """Type III fits of beta_N per hop count, with a per-N table and the raw minima."""

    fits: Dict[int, EvtFit]
    table: pd.DataFrame
    ks_nonincreasing: bool
    beta_samples: Dict[int, np.ndarray] = field(default_factory=dict)


def exponential_min_reference(mean: float = 1.0) -> Callable[[int], Callable]:
    """Exact law of the minimum of N Exp(mean) powers: Exp with mean mean/N."""
    return lambda n_hops: expon(scale=mean / n_hops).cdf


def evt_diagnostics(
    power_sampler: PowerSampler,
    n_values: Sequence[int],
    samples_per_n: int,
    seed: int = 0,
    reference: Optional[Callable[[int], Callable]] = None,
) -> EvtReport:
    """
    Samples beta_N = min of N i.i.d. per-hop powers for each N, fits a Type III law
    and tracks the KS distance as N grows.

    :param reference: Optional N -> exact CDF of beta_N; adds a KS column against it.
    """
    fits: Dict[int, EvtFit] = {}
    minima: Dict[int, np.ndarray] = {}
    rows = []
    for n_hops in n_values:
        n_hops = int(n_hops)
        if n_hops < 1:
            raise ConfigurationError("n_list", "hop counts must be positive")
        powers = power_sampler(trial_rng(seed, n_hops), (int(samples_per_n), n_hops))
        beta = np.min(powers, axis=-1)
        fit = fit_type_iii(beta)
        fits[n_hops], minima[n_hops] = fit, beta
        row = {
            "n_hops": n_hops,
            "shape": fit.shape,
            "a_n": fit.a_n,
            "b_n": fit.b_n,
            "ks_fit": fit.ks_distance,
            "converged": fit.converged,
            "beta_q10": fit.raw_quantiles.get(0.1, math.nan),
            "beta_q50": fit.raw_quantiles.get(0.5, math.nan),
        }
        if reference is not None:
            row["ks_reference"] = ks_distance(beta, reference(n_hops))
        rows.append(row)
        logger.info("EVT N=%d: shape=%.4g, a_N=%.4g, KS=%.4g", n_hops, fit.shape, fit.a_n, fit.ks_distance)

    table = pd.DataFrame(rows)
    # Allow one asymptotic KS critical value of slack between consecutive N.
    tolerance = 1.36 * math.sqrt(2.0 / max(int(samples_per_n), 1))
    ks = table["ks_fit"].to_numpy(dtype=float)
    nonincreasing = bool(np.all(np.diff(ks) <= tolerance)) if ks.size > 1 else True
    return EvtReport(fits=fits, table=table, ks_nonincreasing=nonincreasing, beta_samples=minima)


def chi_convergence_check(
    cfg: NetworkConfig,
    n_values: Sequence[int],
    trials: int,
    seed: int = 0,
    chi_ref: Optional[float] = None,
    power_sampler: Optional[PowerSampler] = None,
) -> pd.DataFrame:
    """
    Normalized adaptive Eb/N0-min r_N = Eb/N0-min · N^{p-1} / (D^p · ln2 · chi_ref)
    for each N with M = cfg.n_slots held fixed.

    chi_ref defaults to an `estimate_chi` run with the same channel law.
    :return: one row per N with mean_ratio, spread (std), q10, q90.
    """
    m_slots = cfg.n_slots
    if chi_ref is None:
        chi_ref = estimate_chi(cfg, trials, seed=seed, power_sampler=power_sampler).value
    if not np.isfinite(chi_ref) or chi_ref <= 0:
        raise ConfigurationError("chi_ref", "reference chi must be a positive real")

    rows = []
    for n_hops in n_values:
        n_hops = int(n_hops)
        if n_hops % m_slots != 0:
            raise ConfigurationError("n_list", f"N = {n_hops} is not a multiple of M = {m_slots}")
        cfg_n = cfg.with_updates(n_hops=n_hops, reuse_sep=n_hops // m_slots)
        plan = build_reuse_plan(cfg_n)
        sampler = power_sampler or hop_power_sampler(cfg_n)
        powers = sampler(trial_rng(seed, n_hops), (int(trials), n_hops))
        ebn0 = np.asarray(ebn0_min_adaptive_closed(cfg_n, phase_bottleneck_powers(plan, powers)), dtype=float)
        ratio = ebn0 / (LN2 * energy_scale(cfg_n) * chi_ref)
        rows.append(
            {
                "n_hops": n_hops,
                "reuse_sep": cfg_n.reuse_sep,
                "n_slots": m_slots,
                "mean_ratio": float(np.mean(ratio)),
                "spread": float(np.std(ratio, ddof=1)) if ratio.size > 1 else 0.0,
                "q10": empirical_quantile(ratio, 0.1),
                "q90": empirical_quantile(ratio, 0.9),
                "chi_ref": float(chi_ref),
            }
        )
        logger.info("r_N at N=%d: mean %.5g, spread %.3g", n_hops, rows[-1]["mean_ratio"], rows[-1]["spread"])
    return pd.DataFrame(rows)

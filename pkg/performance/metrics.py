import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import kstest, weibull_min
from statsmodels.distributions.empirical_distribution import ECDF
from statsmodels.stats.proportion import proportion_confint

from relaying.wideband import EvtFit
from utils.exception_handler import FitConvergenceError
from utils.helpers import Helpers

logger = logging.getLogger(__name__)

Z_95 = 1.959963984540054
SUMMARY_QUANTILES = (0.01, 0.10, 0.50)
RAW_QUANTILE_LEVELS = (0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90)


@dataclass(frozen=True)
class OutageEstimate:
    """Empirical P(I < R) with its Wilson 95% interval; stderr is the half-width over 1.96."""

    p_out: float
    stderr: float
    ci_low: float
    ci_high: float
    n: int


def _as_samples(samples) -> np.ndarray:
    values = np.asarray(samples, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("At least one sample is required.")
    return values


def outage_probability(samples, rate: float) -> OutageEstimate:
    """
    Fraction of samples strictly below `rate`, i.e. the left-limit ECDF at R.

    :param samples: End-to-end mutual information samples.
    :param rate: Target rate R in the same units.
    :return: OutageEstimate with Wilson-interval error.
    """
    values = _as_samples(samples)
    n = values.size
    p_out = float(empirical_cdf_left(values, [rate])[0])
    below = int(round(p_out * n))
    low, high = proportion_confint(below, n, alpha=0.05, method="wilson")
    return OutageEstimate(
        p_out=p_out,
        stderr=float(high - low) / 2.0 / Z_95,
        ci_low=float(low),
        ci_high=float(high),
        n=n,
    )


def empirical_cdf(samples, grid) -> np.ndarray:
    """Right-continuous empirical CDF of `samples` evaluated on `grid`."""
    return ECDF(_as_samples(samples), side="right")(np.asarray(grid, dtype=float))


def empirical_cdf_left(samples, grid) -> np.ndarray:
    """Left limit P(X < x) of the empirical CDF."""
    return ECDF(_as_samples(samples), side="left")(np.asarray(grid, dtype=float))


def empirical_quantile(samples, p):
    """Generalized inverse of the empirical CDF: the smallest x with F(x) >= p."""
    result = np.quantile(_as_samples(samples), p, method="inverted_cdf")
    return float(result) if np.ndim(result) == 0 else result


def quantile_grid(sample_sets: Iterable, points: int) -> np.ndarray:
    """
    Strictly increasing evaluation grid made of empirical quantiles of the pooled
    samples; the last point is the pooled maximum so every CDF on it ends at 1.
    """
    pooled = np.concatenate([_as_samples(s) for s in sample_sets])
    levels = np.linspace(0.0, 1.0, int(points))
    return np.unique(np.quantile(pooled, levels, method="inverted_cdf"))


def ks_distance(samples, cdf: Callable) -> float:
    """Kolmogorov-Smirnov distance between the samples and a reference CDF."""
    return float(kstest(_as_samples(samples), cdf).statistic)


def raw_quantiles(samples, levels: Sequence[float] = RAW_QUANTILE_LEVELS) -> Dict[float, float]:
    values = _as_samples(samples)
    return {float(p): empirical_quantile(values, p) for p in levels}


def fit_type_iii(samples, levels: Sequence[float] = RAW_QUANTILE_LEVELS) -> EvtFit:
    """
    Maximum-likelihood Type III (Weibull-for-minima) fit with the lower endpoint
    pinned at zero, b_N = 0.

    A failed or degenerate fit returns an EvtFit with converged=False and the
    empirical quantiles at `levels` instead of parameters.
    """
    values = _as_samples(samples)
    quantiles = raw_quantiles(values, levels)
    shape = scale = float("nan")
    try:
        if np.any(values <= 0.0) or np.ptp(values) == 0.0:
            raise FitConvergenceError("samples must be positive and not all equal")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            shape, _, scale = weibull_min.fit(values, floc=0.0)
        if not (np.isfinite(shape) and np.isfinite(scale) and shape > 0 and scale > 0):
            raise FitConvergenceError(f"fit returned shape={shape}, scale={scale}")
    except Exception as e:
        logger.warning("Type III fit did not converge on %d samples: %s", values.size, e)
        return EvtFit(
            family="Type III",
            shape=float(shape),
            a_n=float(scale),
            b_n=0.0,
            ks_distance=float("nan"),
            converged=False,
            n_samples=values.size,
            raw_quantiles=quantiles,
        )

    distance = ks_distance(values, weibull_min(shape, loc=0.0, scale=scale).cdf)
    logger.debug("Type III fit: shape=%.6g, a_N=%.6g, KS=%.4g (n=%d)", shape, scale, distance, values.size)
    return EvtFit(
        family="Type III",
        shape=float(shape),
        a_n=float(scale),
        b_n=0.0,
        ks_distance=distance,
        converged=True,
        n_samples=values.size,
        raw_quantiles=quantiles,
    )


class EnsembleMetrics:
    """
    Distribution statistics of end-to-end mutual information per relaying strategy.
    """

    def __init__(self, samples: Mapping[str, np.ndarray], target_rate: float):
        """
        :param samples: Mapping from strategy name to its samples (nats/s/Hz).
        :param target_rate: Target rate R for outage.
        """
        self.samples = {name: _as_samples(values) for name, values in samples.items()}
        self.target_rate = target_rate

    def calculate_mean(self, strategy: str) -> float:
        return float(np.mean(self.samples[strategy]))

    def calculate_variance(self, strategy: str) -> float:
        """Unbiased sample variance; zero for a single sample."""
        values = self.samples[strategy]
        return float(np.var(values, ddof=1)) if values.size > 1 else 0.0

    def calculate_quantiles(self, strategy: str, levels: Sequence[float] = SUMMARY_QUANTILES) -> Dict[str, float]:
        values = self.samples[strategy]
        return {f"q{int(round(p * 100)):02d}": empirical_quantile(values, p) for p in levels}

    def calculate_outage(self, strategy: str) -> OutageEstimate:
        return outage_probability(self.samples[strategy], self.target_rate)

    def check_dominance(self, lower: str = "fixed", upper: str = "adaptive") -> bool:
        """True if every draw of `lower` is at most the paired draw of `upper`."""
        return bool(np.all(self.samples[lower] <= self.samples[upper]))

    def calculate_metrics_summary(self) -> Dict[str, dict]:
        """
        Summarizes every strategy in a table-like dictionary.

        :return: {strategy: {mean, variance, median, q01, q10, q50, mean_bits, p_out, ...}}
        """
        summary = {}
        for strategy in self.samples:
            outage = self.calculate_outage(strategy)
            quantiles = self.calculate_quantiles(strategy)
            mean = self.calculate_mean(strategy)
            summary[strategy] = {
                "mean": mean,
                "mean_bits": Helpers.nats_to_bits(mean),
                "variance": self.calculate_variance(strategy),
                "median": quantiles["q50"],
                **quantiles,
                "p_out": outage.p_out,
                "p_out_stderr": outage.stderr,
                "p_out_ci": [outage.ci_low, outage.ci_high],
            }
        return summary

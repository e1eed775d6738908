"""
Quasi-static frequency-selective fading and OFDM tone responses.

One ChannelRealization holds every signal tap h_{n,v} and interference tap
g_{n,l,v} of a network for one end-to-end evaluation. Arrays may carry extra
leading batch axes (a stack of trials); every function here works along the
trailing axes only.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from network.topology import NetworkConfig, ReusePlan

logger = logging.getLogger(__name__)

PowerSampler = Callable[[np.random.Generator, tuple], np.ndarray]

NORMALIZATION_NOTES = {
    "channel_power": "total average tap power 1: tap v has mean tap_mean*sqrt(pdp_v), variance tap_variance*pdp_v",
    "snr_reference": "snr = P/(N0*B) over the full source-destination distance D",
    "tone_index": "tones w = 1..W, H_w = sum_v h_v exp(-j*2*pi*v*w/W)",
    "rate_units": "nats/s/Hz internally; Eb/N0 = snr*ln2/I",
}


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """
    Independent random stream for one trial, derived only from (seed, trial).
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(trial),))))


@dataclass(frozen=True)
class ChannelRealization:
    """
    signal_taps: complex (..., N, V); interference_taps: complex (..., N, M-1, V).
    """

    signal_taps: np.ndarray
    interference_taps: np.ndarray

    @property
    def n_taps(self) -> int:
        return self.signal_taps.shape[-1]

    @classmethod
    def stack(cls, realizations: Sequence["ChannelRealization"]) -> "ChannelRealization":
        """Stacks single realizations along a new leading batch axis."""
        return cls(
            signal_taps=np.stack([r.signal_taps for r in realizations]),
            interference_taps=np.stack([r.interference_taps for r in realizations]),
        )


@dataclass(frozen=True)
class ToneGrid:
    """
    signal_tones H_{n,w}: (..., N, W); interference_tones G_{n,l,w}: (..., N, M-1, W);
    hop_power (1/W)·sum_w |H_{n,w}|^2: (..., N).
    """

    signal_tones: np.ndarray
    interference_tones: np.ndarray
    hop_power: np.ndarray


def _tap_law(cfg: NetworkConfig):
    # PDP weights sum to one, so they carry the unit-total-power normalization.
    weights = np.asarray(cfg.pdp, dtype=float)
    means = complex(cfg.fading.tap_mean) * np.sqrt(weights)
    stds = np.sqrt(cfg.fading.tap_variance * weights / 2.0)
    return means, stds


def _complex_gaussian(rng: np.random.Generator, shape: tuple, means: np.ndarray, stds: np.ndarray) -> np.ndarray:
    draws = rng.standard_normal(size=shape + (2,))
    return means + stds * (draws[..., 0] + 1j * draws[..., 1])


def draw_realization(cfg: NetworkConfig, plan: ReusePlan, rng: np.random.Generator) -> ChannelRealization:
    """
    Draws one quasi-static realization.

    Tap v of every link is complex Gaussian with mean tap_mean·sqrt(pdp_v) and
    variance tap_variance·pdp_v. Interference taps are drawn per
    (receiver hop, interferer) pair, independently of the signal taps. The draw
    order (signal block, then interference block) is fixed so that a realization
    depends only on the stream it is given.
    """
    means, stds = _tap_law(cfg)
    signal = _complex_gaussian(rng, (cfg.n_hops, cfg.n_taps), means, stds)
    interference = _complex_gaussian(rng, (cfg.n_hops, plan.n_interferers, cfg.n_taps), means, stds)
    return ChannelRealization(signal_taps=signal, interference_taps=interference)


def _tone_response(taps: np.ndarray, n_tones: int) -> np.ndarray:
    # H_w = sum_v h_v exp(-j2πvw/W) for w = 1..W; DFT bin W mod W = 0 goes last.
    return np.roll(np.fft.fft(taps, n=n_tones, axis=-1), -1, axis=-1)


def tones_from_taps(real: ChannelRealization, n_tones: int) -> ToneGrid:
    """
    Converts tap-domain channels to tone responses on tones w = 1..W.

    :raises ValueError: if the realization has more taps than tones.
    """
    if real.n_taps > n_tones:
        raise ValueError(f"V = {real.n_taps} taps exceed W = {n_tones} tones; the cyclic prefix cannot cover the channel.")
    signal_tones = _tone_response(real.signal_taps, n_tones)
    interference_tones = _tone_response(real.interference_taps, n_tones)
    hop_power = np.mean(np.abs(signal_tones) ** 2, axis=-1)
    return ToneGrid(signal_tones=signal_tones, interference_tones=interference_tones, hop_power=hop_power)


def hop_power_sampler(cfg: NetworkConfig) -> PowerSampler:
    """
    Sampler of i.i.d. per-hop channel powers (1/W)·sum_w |H_w|^2 under the law of `cfg`.

    By Parseval the tone average equals sum_v |h_v|^2, so only taps are drawn.
    The returned callable maps (rng, shape) to an array of that shape.
    """
    means, stds = _tap_law(cfg)

    def sample(rng: np.random.Generator, shape: tuple) -> np.ndarray:
        taps = _complex_gaussian(rng, tuple(shape) + (cfg.n_taps,), means, stds)
        return np.sum(np.abs(taps) ** 2, axis=-1)

    return sample


def exponential_power_sampler(mean: float = 1.0) -> PowerSampler:
    """Per-hop powers ~ Exp(mean): the flat Rayleigh channel with a single tap."""

    def sample(rng: np.random.Generator, shape: tuple) -> np.ndarray:
        return rng.exponential(scale=mean, size=tuple(shape))

    return sample


def constant_power_sampler(value: float = 1.0) -> PowerSampler:
    """Degenerate per-hop powers fixed at `value`; a test hook for deterministic channels."""

    def sample(rng: np.random.Generator, shape: tuple) -> np.ndarray:
        return np.full(tuple(shape), float(value))

    return sample


def unit_realization(cfg: NetworkConfig, plan: ReusePlan, rng: np.random.Generator) -> ChannelRealization:
    """
    Deterministic realization with h_{n,0} = 1, all other taps and every
    interference tap zero. Same signature as `draw_realization`.
    """
    signal = np.zeros((cfg.n_hops, cfg.n_taps), dtype=complex)
    signal[:, 0] = 1.0
    interference = np.zeros((cfg.n_hops, plan.n_interferers, cfg.n_taps), dtype=complex)
    return ChannelRealization(signal_taps=signal, interference_taps=interference)

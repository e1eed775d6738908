"""
Linear network geometry and spatial-reuse phase structure.

Terminals T_1 .. T_{N+1} sit on a line of length D at positions (j-1)·D/N.
Hop n carries T_n -> T_{n+1}. With reuse separation K the N hops are split
into K phases; phase k activates the transmitters T_k, T_{k+K}, ..., so the
M = N/K hops of one phase interfere with each other.

Hop, phase, slot and terminal indices are 1-based everywhere in the public
interface. Arrays indexed by hop use position n-1.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from utils.exception_handler import ConfigurationError

logger = logging.getLogger(__name__)

PDP_TOLERANCE = 1e-12


@dataclass(frozen=True)
class FadingSpec:
    """Per-tap complex Gaussian law before PDP scaling. A zero mean gives Rayleigh taps."""

    tap_mean: complex = complex(1.0 / math.sqrt(2.0), 0.0)
    tap_variance: float = 0.5

    def validate(self):
        if not np.isfinite(self.tap_variance) or self.tap_variance <= 0:
            raise ConfigurationError("fading.variance", "tap variance must be positive")
        if not np.isfinite(complex(self.tap_mean)):
            raise ConfigurationError("fading.mean", "tap mean must be finite")

    @property
    def mean_power(self) -> float:
        """Average power |mean|^2 + variance of one unscaled tap."""
        return abs(self.tap_mean) ** 2 + self.tap_variance

    @property
    def is_rayleigh(self) -> bool:
        return self.tap_mean == 0


@dataclass(frozen=True)
class NetworkConfig:
    """
    Static scenario description.

    :param n_hops: N, number of hops.
    :param reuse_sep: K, spatial reuse separation (K divides N).
    :param distance: D, source-destination distance in meters.
    :param pathloss_exp: p, path-loss exponent (p >= 2).
    :param n_tones: W, number of OFDM tones.
    :param n_taps: V, number of delay taps (V <= W).
    :param pdp: V power delay profile weights summing to 1.
    :param fading: Per-tap fading law.
    :param snr: P/(N0·B), linear.
    """

    n_hops: int
    reuse_sep: int
    distance: float = 1.0
    pathloss_exp: float = 4.0
    n_tones: int = 1
    n_taps: int = 1
    pdp: Tuple[float, ...] = ()
    fading: FadingSpec = field(default_factory=FadingSpec)
    snr: float = 1.0

    def __post_init__(self):
        # Materialize the equal-power profile when none is given.
        if not self.pdp and isinstance(self.n_taps, int) and self.n_taps > 0:
            object.__setattr__(self, "pdp", tuple([1.0 / self.n_taps] * self.n_taps))
        else:
            object.__setattr__(self, "pdp", tuple(float(w) for w in self.pdp))
        self.validate()

    @property
    def n_slots(self) -> int:
        """M = N/K, simultaneous transmissions per phase."""
        return self.n_hops // self.reuse_sep

    @property
    def hop_distance(self) -> float:
        """d_n = D/N."""
        return self.distance / self.n_hops

    @property
    def snr_gain(self) -> float:
        """N^{p-1}·K/D^p, the per-tone SNR scale of a unit-power channel."""
        n, p = self.n_hops, self.pathloss_exp
        return n ** (p - 1.0) * self.reuse_sep / self.distance ** p

    def validate(self):
        """Checks every scenario invariant and raises ConfigurationError naming the field."""
        for name in ("n_hops", "reuse_sep", "n_tones", "n_taps"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigurationError(name, "must be a positive integer")
        if self.reuse_sep > self.n_hops:
            raise ConfigurationError("reuse_sep", "K must satisfy 1 <= K <= N")
        if self.n_hops % self.reuse_sep != 0:
            raise ConfigurationError("reuse_sep", "K must divide N")
        if self.reuse_sep == 1 and self.n_hops > 1:
            raise ConfigurationError(
                "reuse_sep", "K = 1 with N > 1 would make a terminal transmit and receive at once"
            )
        if not np.isfinite(self.distance) or self.distance <= 0:
            raise ConfigurationError("distance", "D must be a positive real")
        if not np.isfinite(self.pathloss_exp) or self.pathloss_exp < 2:
            raise ConfigurationError("pathloss_exp", "p must be at least 2")
        if self.n_taps > self.n_tones:
            raise ConfigurationError("n_taps", "V <= W required (cyclic prefix covers the channel)")
        if len(self.pdp) != self.n_taps:
            raise ConfigurationError("pdp", f"expected {self.n_taps} weights, got {len(self.pdp)}")
        weights = np.asarray(self.pdp, dtype=float)
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ConfigurationError("pdp", "weights must be nonnegative")
        if abs(weights.sum() - 1.0) > PDP_TOLERANCE:
            raise ConfigurationError("pdp", "weights must sum to 1 within 1e-12")
        if not isinstance(self.fading, FadingSpec):
            raise ConfigurationError("fading", "expected a FadingSpec")
        self.fading.validate()
        if not np.isfinite(self.snr) or self.snr <= 0:
            raise ConfigurationError("snr", "SNR must be a positive real")

    def with_updates(self, **changes) -> "NetworkConfig":
        """Returns a copy with some fields replaced; pdp is re-derived when n_taps changes."""
        values = {
            "n_hops": self.n_hops,
            "reuse_sep": self.reuse_sep,
            "distance": self.distance,
            "pathloss_exp": self.pathloss_exp,
            "n_tones": self.n_tones,
            "n_taps": self.n_taps,
            "pdp": self.pdp,
            "fading": self.fading,
            "snr": self.snr,
        }
        if "n_taps" in changes and "pdp" not in changes:
            values["pdp"] = ()
        values.update(changes)
        return NetworkConfig(**values)

    def to_dict(self) -> dict:
        """JSON-ready echo using the scenario file keys."""
        mean = complex(self.fading.tap_mean)
        return {
            "n_hops": int(self.n_hops),
            "reuse_sep": int(self.reuse_sep),
            "distance": float(self.distance),
            "pathloss_exp": float(self.pathloss_exp),
            "n_tones": int(self.n_tones),
            "n_taps": int(self.n_taps),
            "pdp": [float(w) for w in self.pdp],
            "fading": {"mean_re": mean.real, "mean_im": mean.imag, "variance": float(self.fading.tap_variance)},
            "snr": float(self.snr),
        }


@dataclass(frozen=True)
class Interferer:
    """A simultaneously transmitting terminal T_l and its distance f_{n,l} to the receiver."""

    terminal: int
    distance: float


@dataclass(frozen=True)
class Phase:
    """Reuse phase k and the hops (equivalently, transmitter indices) active in it."""

    index: int
    hops: Tuple[int, ...]


@dataclass(frozen=True)
class ReusePlan:
    """
    Immutable phase partition and intra-route interference sets of one network.

    `interferers[n]` is L_n for hop n as a tuple of Interferer records, ordered by
    terminal index. Interference tap arrays use the same order along their l axis.
    """

    n_hops: int
    reuse_sep: int
    phases: Tuple[Phase, ...]
    interferers: Dict[int, Tuple[Interferer, ...]]
    hop_distance: float

    @property
    def n_slots(self) -> int:
        return self.n_hops // self.reuse_sep

    @property
    def n_interferers(self) -> int:
        """|L_n| = M - 1, identical for every hop."""
        return self.n_slots - 1

    def interferer_distances(self) -> np.ndarray:
        """Array (N, M-1) of f_{n,l}, row n-1 in L_n order."""
        rows = [[i.distance for i in self.interferers[n]] for n in range(1, self.n_hops + 1)]
        return np.asarray(rows, dtype=float).reshape(self.n_hops, self.n_interferers)

    def group_by_phase(self, hop_values: np.ndarray) -> np.ndarray:
        """
        Rearranges a trailing hop axis (..., N) into (..., K, M) with entry [k-1, m-1]
        holding hop n = (m-1)K + k.
        """
        values = np.asarray(hop_values)
        if values.shape[-1] != self.n_hops:
            raise ValueError(f"Expected a trailing hop axis of length {self.n_hops}.")
        shaped = values.reshape(values.shape[:-1] + (self.n_slots, self.reuse_sep))
        return np.swapaxes(shaped, -1, -2)


def build_reuse_plan(cfg: NetworkConfig) -> ReusePlan:
    """
    Builds the phase partition and interference sets for `cfg`.

    Distances come from index arithmetic, f_{n,l} = |l - 1 - n|·D/N, never from
    subtracting floating-point positions.
    """
    cfg.validate()
    n_hops, k_sep, m_slots = cfg.n_hops, cfg.reuse_sep, cfg.n_slots
    unit = cfg.distance / n_hops

    phases = tuple(
        Phase(index=k, hops=tuple((m - 1) * k_sep + k for m in range(1, m_slots + 1)))
        for k in range(1, k_sep + 1)
    )

    interferers: Dict[int, Tuple[Interferer, ...]] = {}
    for phase in phases:
        for n in phase.hops:
            interferers[n] = tuple(
                Interferer(terminal=l, distance=abs(l - 1 - n) * unit)
                for l in phase.hops
                if l != n
            )

    logger.debug(
        "Built reuse plan: N=%d, K=%d, M=%d, %d interference links",
        n_hops, k_sep, m_slots, sum(len(v) for v in interferers.values()),
    )
    return ReusePlan(
        n_hops=n_hops,
        reuse_sep=k_sep,
        phases=phases,
        interferers=interferers,
        hop_distance=unit,
    )


def phase_of_hop(plan: ReusePlan, n: int) -> Tuple[int, int]:
    """
    Returns (k, m) with n = (m-1)K + k, 1 <= k <= K, 1 <= m <= M.

    :raises ValueError: if n is outside 1..N.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or not 1 <= n <= plan.n_hops:
        raise ValueError(f"Hop index must be an integer in 1..{plan.n_hops}, got {n!r}.")
    m, k = divmod(int(n) - 1, plan.reuse_sep)
    return k + 1, m + 1


def terminal_positions(cfg: NetworkConfig) -> Sequence[float]:
    """Positions (j-1)·D/N of terminals T_1 .. T_{N+1}."""
    return [j * cfg.distance / cfg.n_hops for j in range(cfg.n_hops + 1)]

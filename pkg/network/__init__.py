"""
Network Package

Geometry and channels of a linear multihop route.

Modules:
- topology: scenario description (NetworkConfig, FadingSpec), spatial-reuse
  phases and intra-route interference sets (ReusePlan).
- channel: seeded quasi-static tap draws, OFDM tone responses and per-hop
  channel-power samplers.
"""

import logging

from .topology import (
    FadingSpec,
    Interferer,
    NetworkConfig,
    Phase,
    ReusePlan,
    build_reuse_plan,
    phase_of_hop,
    terminal_positions,
)
from .channel import (
    ChannelRealization,
    ToneGrid,
    draw_realization,
    exponential_power_sampler,
    constant_power_sampler,
    hop_power_sampler,
    tones_from_taps,
    trial_rng,
    unit_realization,
)

__all__ = [
    "FadingSpec",
    "Interferer",
    "NetworkConfig",
    "Phase",
    "ReusePlan",
    "build_reuse_plan",
    "phase_of_hop",
    "terminal_positions",
    "ChannelRealization",
    "ToneGrid",
    "draw_realization",
    "exponential_power_sampler",
    "constant_power_sampler",
    "hop_power_sampler",
    "tones_from_taps",
    "trial_rng",
    "unit_realization",
]

logger = logging.getLogger("network")

"""
Relaying Package

Rate and energy-efficiency analysis of decode-and-forward relaying over a
linear multihop route.

Modules:
- linkmath: per-tone SINR with intra-route interference, per-hop mutual
  information, and end-to-end mutual information under fixed-rate (equal
  time-sharing) and rate-adaptive (optimal time-sharing) relaying.
- wideband: Eb/N0 curves, Eb/N0-min in closed form and as a numeric low-SNR
  limit, wideband slope, and outage-constrained Eb/N0-min.
"""

import logging

from .linkmath import (
    LinkRates,
    compute_link_rates,
    e2e_fixed_rate,
    e2e_maxmin_oracle,
    e2e_rate_adaptive,
    hop_mutual_info,
    interference_load,
    sinr_grid,
)
from .wideband import (
    EvtFit,
    FrozenChannelRate,
    OutageEnergy,
    WidebandMetrics,
    ebn0_curve,
    ebn0_min_adaptive_closed,
    ebn0_min_fixed_closed,
    ebn0_min_numeric,
    ebn0_min_outage,
    make_mi_evaluator,
    s0_numeric,
    wideband_metrics,
)

__all__ = [
    "LinkRates",
    "compute_link_rates",
    "e2e_fixed_rate",
    "e2e_maxmin_oracle",
    "e2e_rate_adaptive",
    "hop_mutual_info",
    "interference_load",
    "sinr_grid",
    "EvtFit",
    "FrozenChannelRate",
    "OutageEnergy",
    "WidebandMetrics",
    "ebn0_curve",
    "ebn0_min_adaptive_closed",
    "ebn0_min_fixed_closed",
    "ebn0_min_numeric",
    "ebn0_min_outage",
    "make_mi_evaluator",
    "s0_numeric",
    "wideband_metrics",
]

logger = logging.getLogger("relaying")

"""
Performance Package

The `performance` package runs seeded Monte Carlo ensembles over multihop
scenarios and turns their samples into statistics and result files.

Modules:
- Montecarlo: trial engine (chunked, thread-parallel, worker-count independent),
  chi estimation, extreme-value diagnostics of the weakest hop and the
  convergence check of the normalized rate-adaptive Eb/N0-min.
- Metrics: empirical CDFs and quantiles, outage probability with Wilson
  intervals, Type III fits and per-strategy distribution summaries.
- Reporting: manifest-stamped CSV and JSON writers and readers.
"""

import logging

from .metrics import EnsembleMetrics, OutageEstimate, empirical_cdf, empirical_quantile, fit_type_iii, outage_probability
from .montecarlo import (
    ChiEstimate,
    EvtReport,
    McConfig,
    McSummary,
    MonteCarloEngine,
    TrialBatch,
    chi_convergence_check,
    estimate_chi,
    evt_diagnostics,
    run_ensemble,
)
from .reporting import Reporting

# Define public API
__all__ = [
    "EnsembleMetrics",
    "OutageEstimate",
    "empirical_cdf",
    "empirical_quantile",
    "fit_type_iii",
    "outage_probability",
    "ChiEstimate",
    "EvtReport",
    "McConfig",
    "McSummary",
    "MonteCarloEngine",
    "TrialBatch",
    "chi_convergence_check",
    "estimate_chi",
    "evt_diagnostics",
    "run_ensemble",
    "Reporting",
]

logger = logging.getLogger("performance")

import argparse
import math
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from config import settings
from config.scenario import parse_config
from network import (
    build_reuse_plan,
    constant_power_sampler,
    draw_realization,
    exponential_power_sampler,
    hop_power_sampler,
    tones_from_taps,
    trial_rng,
)
from performance import Reporting, chi_convergence_check, estimate_chi, evt_diagnostics, run_ensemble
from performance.montecarlo import exponential_min_reference
from relaying import ebn0_min_outage, wideband_metrics
from utils import ConfigurationError, ExceptionHandler, Helpers, Logger

# Initialize logging
logger = Logger.get_logger()

# (label, N, K, W, V): flat and selective fading, direct link versus eight hops with and without reuse.
REFERENCE_GRID = (
    ("N1_K1_flat", 1, 1, 1, 1),
    ("N8_K4_flat", 8, 4, 1, 1),
    ("N8_K8_flat", 8, 8, 1, 1),
    ("N1_K1_selective", 1, 1, 4, 2),
    ("N8_K4_selective", 8, 4, 4, 2),
    ("N8_K8_selective", 8, 8, 4, 2),
)
DEFAULT_SNR_GRID = "1e-8:10:46"
DEFAULT_N_LIST = "4,16,64"
DEFAULT_P_OUT = "0.01,0.1"


def display_banner():
    """
    Displays the tool name and version.
    """
    print(f"\n--- MULTIHOP WIDEBAND RELAYING SIMULATOR v{settings.TOOL_VERSION} ---\n")


def parse_snr_grid(text: str) -> np.ndarray:
    """
    Parses 'lo:hi:points' into `points` log-spaced linear SNR values from lo to hi.
    """
    try:
        lo, hi, points = text.split(":")
        lo, hi, points = float(lo), float(hi), int(points)
    except ValueError as e:
        raise ConfigurationError("snr_grid", f"expected lo:hi:points, got '{text}'") from e
    if not (0 < lo < hi) or points < 2:
        raise ConfigurationError("snr_grid", "need 0 < lo < hi and at least 2 points")
    return np.geomspace(lo, hi, points)


def parse_int_list(text: str, field: str) -> List[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigurationError(field, f"expected comma-separated integers, got '{text}'") from e
    if not values or any(v < 1 for v in values):
        raise ConfigurationError(field, "values must be positive integers")
    return values


def parse_float_list(text: str, field: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigurationError(field, f"expected comma-separated numbers, got '{text}'") from e
    if not values or any(not 0 < v < 1 for v in values):
        raise ConfigurationError(field, "probabilities must lie in (0, 1)")
    return values


def _overrides(args) -> Dict:
    return {"seed": args.seed, "trials": args.trials, "target_rate": getattr(args, "rate", None)}


def power_model(cfg, name: str):
    """
    Returns (sampler, small-power exponent, exact beta_N reference or None) for a --power-model.
    """
    if name == "exponential":
        return exponential_power_sampler(1.0), 1, exponential_min_reference(1.0)
    if name == "unit":
        return constant_power_sampler(1.0), None, None
    reference = None
    if cfg.fading.is_rayleigh and cfg.n_taps == 1:
        reference = exponential_min_reference(cfg.fading.mean_power)
    return hop_power_sampler(cfg), cfg.n_taps, reference


def cmd_tradeoff(args) -> List[str]:
    """
    Eb/N0 versus spectral efficiency of one frozen realization, both strategies.
    """
    options = {"snr_grid": args.snr_grid, "channel": args.channel}
    cfg, mc, manifest = parse_config(args.config, _overrides(args), command="tradeoff", options=options)
    plan = build_reuse_plan(cfg)
    reporting = Reporting(args.out, manifest)

    if args.channel:
        realization = Reporting.read_channel(args.channel)
        expected = (cfg.n_hops, cfg.n_taps)
        if realization.signal_taps.shape != expected or realization.interference_taps.shape != (
            cfg.n_hops, plan.n_interferers, cfg.n_taps
        ):
            raise ConfigurationError("channel", f"tap arrays do not match N={cfg.n_hops}, M-1={plan.n_interferers}, V={cfg.n_taps}")
        logger.info(f"Using channel realization from {args.channel}.")
    else:
        realization = draw_realization(cfg, plan, trial_rng(mc.seed, 0))
    tones = tones_from_taps(realization, cfg.n_tones)

    snr_grid = parse_snr_grid(args.snr_grid)
    fixed = wideband_metrics(cfg, plan, tones, "fixed", snr_grid=snr_grid)
    adaptive = wideband_metrics(cfg, plan, tones, "adaptive", snr_grid=snr_grid)

    table = pd.DataFrame(
        {
            "snr": snr_grid,
            "I_fixed": fixed.curve["I"].to_numpy(),
            "I_adaptive": adaptive.curve["I"].to_numpy(),
            "ebn0_fixed_dB": fixed.curve["ebn0_db"].to_numpy(),
            "ebn0_adaptive_dB": adaptive.curve["ebn0_db"].to_numpy(),
        }
    )
    footer = {
        "ebn0_min_fixed": fixed.ebn0_min_closed,
        "ebn0_min_fixed_dB": Helpers.to_db(fixed.ebn0_min_closed),
        "ebn0_min_adaptive": adaptive.ebn0_min_closed,
        "ebn0_min_adaptive_dB": Helpers.to_db(adaptive.ebn0_min_closed),
        "ebn0_min_numeric_fixed": fixed.ebn0_min_numeric,
        "ebn0_min_numeric_adaptive": adaptive.ebn0_min_numeric,
        "s0_closed": fixed.s0_closed,
        "s0_numeric_fixed": fixed.s0_numeric,
        "s0_numeric_adaptive": adaptive.s0_numeric,
    }
    paths = [
        reporting.write_csv("tradeoff.csv", table, footer=footer),
        reporting.write_json("tradeoff_footer.json", {"footer": footer, "wideband": [fixed.as_dict(), adaptive.as_dict()]}),
    ]
    if args.dump_channel:
        paths.append(reporting.write_channel(args.dump_channel, realization))
    return paths


def _run_cdf_scenario(cfg, mc, manifest, args, label: str) -> List[str]:
    summary = run_ensemble(cfg, mc, workers=args.workers)
    reporting = Reporting(args.out, manifest)
    cdf_ok = bool(np.all(summary.cdf["cdf_adaptive"].to_numpy() <= summary.cdf["cdf_fixed"].to_numpy()))
    if not cdf_ok:
        reporting.log_event(f"Adaptive CDF exceeds fixed-rate CDF somewhere in scenario {label}.", level="warning")
    payload = summary.as_dict()
    payload["scenario"] = label
    payload["cdf_dominance"] = cdf_ok
    return [
        reporting.write_csv(f"cdf_{label}.csv", summary.cdf),
        reporting.write_json(f"summary_{label}.json", payload),
    ]


def cmd_cdf(args) -> List[str]:
    """
    Empirical CDFs of end-to-end mutual information, for one scenario or the
    six-scenario reproduction grid with a shared seed.
    """
    options = {"scenario": args.scenario}
    cfg, mc, manifest = parse_config(args.config, _overrides(args), command="cdf", options=options)
    if args.scenario == "single":
        return _run_cdf_scenario(cfg, mc, manifest, args, "single")

    paths = []
    for label, n_hops, reuse_sep, n_tones, n_taps in REFERENCE_GRID:
        logger.info(f"Scenario {label}: N={n_hops}, K={reuse_sep}, W={n_tones}, V={n_taps}")
        scenario_cfg = cfg.with_updates(n_hops=n_hops, reuse_sep=reuse_sep, n_tones=n_tones, n_taps=n_taps)
        scenario_manifest = manifest.with_config(scenario_cfg, label=label)
        paths.extend(_run_cdf_scenario(scenario_cfg, mc, scenario_manifest, args, label))
    return paths


def cmd_convergence(args) -> List[str]:
    """
    Extreme-value table of beta_N (fixed-rate study) and the normalized
    rate-adaptive Eb/N0-min ratio r_N with M held fixed.
    """
    options = {"n_list": args.n_list, "m_fixed": args.m_fixed, "power_model": args.power_model}
    cfg, mc, manifest = parse_config(args.config, _overrides(args), command="convergence", options=options)
    n_values = parse_int_list(args.n_list, "n_list")
    m_fixed = args.m_fixed
    reporting = Reporting(args.out, manifest)

    sampler, exponent, reference = power_model(cfg, args.power_model)
    evt = evt_diagnostics(sampler, n_values, mc.trials, seed=mc.seed, reference=reference)

    base = cfg.with_updates(n_hops=m_fixed * 2 if m_fixed > 1 else 1, reuse_sep=2 if m_fixed > 1 else 1)
    chi = estimate_chi(base, mc.trials, seed=mc.seed, power_sampler=None if args.power_model == "config" else sampler,
                       small_power_exponent=exponent)
    valid = [n for n in n_values if n % m_fixed == 0 and (m_fixed == 1 or n // m_fixed >= 2)]
    skipped = sorted(set(n_values) - set(valid))
    if skipped:
        reporting.log_event(f"Skipping N values {skipped}: need K = N/M >= 2 integer for M = {m_fixed}.", level="warning")
    ratios = chi_convergence_check(
        base, valid, mc.trials, seed=mc.seed, chi_ref=chi.value,
        power_sampler=None if args.power_model == "config" else sampler,
    )
    return [
        reporting.write_csv("convergence_evt.csv", evt.table, footer={"ks_nonincreasing": evt.ks_nonincreasing}),
        reporting.write_csv(
            "convergence_chi.csv",
            ratios,
            footer={"chi": chi.value, "chi_stderr": chi.stderr, "chi_integrability": chi.integrability},
        ),
    ]


def cmd_evt(args) -> List[str]:
    """
    Type III fits of beta_N over --n-list and the outage-constrained Eb/N0-min
    (no spatial reuse, K = N) in both quantile modes at each --p-out level.
    """
    options = {"n_list": args.n_list, "p_out": args.p_out, "power_model": args.power_model}
    cfg, mc, manifest = parse_config(args.config, _overrides(args), command="evt", options=options)
    n_values = parse_int_list(args.n_list, "n_list")
    levels = parse_float_list(args.p_out, "p_out")
    reporting = Reporting(args.out, manifest)

    sampler, _, reference = power_model(cfg, args.power_model)
    evt = evt_diagnostics(sampler, n_values, mc.trials, seed=mc.seed, reference=reference)

    rows = []
    for n_hops in n_values:
        cfg_n = cfg.with_updates(n_hops=n_hops, reuse_sep=n_hops)
        fit = evt.fits[n_hops]
        for p_out in levels:
            empirical = ebn0_min_outage(evt.beta_samples[n_hops], p_out, cfg_n, mode="empirical")
            try:
                fitted = ebn0_min_outage(fit, p_out, cfg_n, mode="evt")
            except ValueError as e:
                ExceptionHandler.suppress_exceptions(e, f"EVT quantile at N={n_hops}, p_out={p_out}")
                fitted = None
            rows.append(
                {
                    "n_hops": n_hops,
                    "p_out": p_out,
                    "quantile_evt": fitted.quantile if fitted else math.nan,
                    "ebn0_out_evt_dB": fitted.value_db if fitted else math.nan,
                    "quantile_empirical": empirical.quantile,
                    "ebn0_out_empirical_dB": empirical.value_db,
                    "flagged": bool(empirical.flagged or (fitted is None) or fitted.flagged),
                }
            )
    return [
        reporting.write_csv("evt_fits.csv", evt.table),
        reporting.write_csv("evt_outage.csv", pd.DataFrame(rows)),
    ]


COMMANDS = {
    "tradeoff": cmd_tradeoff,
    "cdf": cmd_cdf,
    "convergence": cmd_convergence,
    "evt": cmd_evt,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Scenario JSON (plain or a summary with an embedded manifest).")
    common.add_argument("--seed", type=int, help="64-bit root seed; generated and recorded when omitted.")
    common.add_argument("--trials", type=int, help="Monte Carlo trials (or samples per N).")
    common.add_argument("--out", default=settings.OUTPUT_DIR, help="Output directory.")
    common.add_argument("--workers", type=int, default=settings.MAX_WORKERS, help="Worker threads.")
    common.add_argument("--log-level", default=settings.LOGGING_LEVEL, help="Console log level.")

    parser = argparse.ArgumentParser(description="Wideband OFDM linear multihop relaying simulator.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    tradeoff = subparsers.add_parser("tradeoff", parents=[common], help="Eb/N0 curves of one frozen realization.")
    tradeoff.add_argument("--snr-grid", default=DEFAULT_SNR_GRID, help="lo:hi:points, log-spaced linear SNR.")
    tradeoff.add_argument("--channel", help="Replay a channel JSON written by --dump-channel.")
    tradeoff.add_argument("--dump-channel", help="File name (in --out) for the realization used.")

    cdf = subparsers.add_parser("cdf", parents=[common], help="CDF of end-to-end mutual information.")
    cdf.add_argument("--scenario", choices=("single", "grid"), default="single")
    cdf.add_argument("--rate", type=float, help="Target rate R in nats/s/Hz for outage.")

    for name, text in (("convergence", "Multihop-diversity convergence tables."), ("evt", "Extreme-value fits and outage Eb/N0-min.")):
        sub = subparsers.add_parser(name, parents=[common], help=text)
        sub.add_argument("--n-list", default=DEFAULT_N_LIST, help="Comma-separated hop counts.")
        sub.add_argument("--power-model", choices=("config", "exponential", "unit"), default="config")
        if name == "convergence":
            sub.add_argument("--m-fixed", type=int, default=1, help="Simultaneous transmissions M held fixed.")
        else:
            sub.add_argument("--p-out", default=DEFAULT_P_OUT, help="Comma-separated outage levels.")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parses the command line and runs one subcommand. Returns the exit status.
    """
    args = build_parser().parse_args(argv)
    try:
        Logger.set_console_level(args.log_level)
        if args.workers < 1:
            raise ConfigurationError("workers", "must be a positive integer")
        if getattr(args, "m_fixed", 1) < 1:
            raise ConfigurationError("m_fixed", "must be a positive integer")
        display_banner()
        paths = COMMANDS[args.command](args)
        for path in paths:
            print(path)
        logger.info(f"Command '{args.command}' wrote {len(paths)} file(s).")
        return 0
    except Exception as e:
        ExceptionHandler.log_and_handle_exception(e, f"cmd_{args.command}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""
Scenario files and run manifests.

A scenario is a flat JSON object with the keys in `SCENARIO_KEYS`; `fading` is a
nested object with `FADING_KEYS`. Every summary written by the simulator embeds
its manifest as {"manifest": {"config": {...}, ...}}, and such a file is itself a
valid scenario, so any run can be repeated from its own output.
"""

import json
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config import settings
from network.channel import NORMALIZATION_NOTES
from network.topology import FadingSpec, NetworkConfig
from performance.montecarlo import MAX_SEED, McConfig
from utils.exception_handler import ConfigurationError
from utils.helpers import Helpers

logger = logging.getLogger(__name__)

NETWORK_KEYS = ("n_hops", "reuse_sep", "distance", "pathloss_exp", "n_tones", "n_taps", "pdp", "fading", "snr")
MC_KEYS = ("trials", "seed", "target_rate")
SCENARIO_KEYS = NETWORK_KEYS + MC_KEYS
FADING_KEYS = ("mean_re", "mean_im", "variance")


@dataclass(frozen=True)
class RunManifest:
    """
    Everything needed to repeat a run: the resolved scenario (all defaults
    materialized, seed included), command options, tool version and the
    normalization choices. The timestamp is informative only and is not hashed.
    """

    config: Dict[str, Any]
    seed: int
    command: str = ""
    options: Dict[str, Any] = field(default_factory=dict)
    tool_version: str = settings.TOOL_VERSION
    normalization: Dict[str, str] = field(default_factory=lambda: dict(NORMALIZATION_NOTES))
    timestamp: str = field(default_factory=Helpers.utc_timestamp)

    def hashed_fields(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "command": self.command,
            "options": self.options,
            "tool_version": self.tool_version,
            "normalization": self.normalization,
        }

    @property
    def digest(self) -> str:
        """SHA-256 of the canonical JSON of every field except the timestamp."""
        return Helpers.stable_hash(self.hashed_fields())

    def to_dict(self) -> Dict[str, Any]:
        payload = self.hashed_fields()
        payload.update({"seed": self.seed, "timestamp": self.timestamp, "manifest_hash": self.digest})
        return payload

    def with_config(self, cfg: NetworkConfig, **options) -> "RunManifest":
        """Manifest of a derived scenario (same seed and run parameters, new network)."""
        config = dict(self.config)
        config.update(cfg.to_dict())
        merged = dict(self.options)
        merged.update(options)
        return replace(self, config=config, options=merged)


def generate_seed() -> int:
    """Fresh 64-bit seed from OS entropy."""
    return int(np.random.SeedSequence().entropy) % MAX_SEED


def _read_file(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise ConfigurationError("config", f"file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigurationError("config", f"invalid JSON in {path}: {e}") from e
    if not isinstance(payload, dict):
        raise ConfigurationError("config", "top-level JSON value must be an object")
    if "manifest" in payload:
        manifest = payload["manifest"]
        if not isinstance(manifest, dict) or not isinstance(manifest.get("config"), dict):
            raise ConfigurationError("manifest", "expected an object with a 'config' object")
        logger.info("Loaded scenario from the manifest embedded in %s", path)
        return dict(manifest["config"])
    return payload


def _fading_from(raw: Any) -> FadingSpec:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigurationError("fading", "must be an object with mean_re, mean_im, variance")
    unknown = sorted(set(raw) - set(FADING_KEYS))
    if unknown:
        raise ConfigurationError(f"fading.{unknown[0]}", "unknown key")
    try:
        mean = complex(
            float(raw.get("mean_re", settings.DEFAULT_TAP_MEAN_RE)),
            float(raw.get("mean_im", settings.DEFAULT_TAP_MEAN_IM)),
        )
        variance = float(raw.get("variance", settings.DEFAULT_TAP_VARIANCE))
    except (TypeError, ValueError) as e:
        raise ConfigurationError("fading", f"values must be numbers ({e})") from e
    return FadingSpec(tap_mean=mean, tap_variance=variance)


def _number(raw: Dict[str, Any], key: str, default: float) -> float:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(key, "must be a number")
    return float(value)


def _integer(raw: Dict[str, Any], key: str, default: int) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(key, "must be an integer")
    return value


def build_configs(raw: Dict[str, Any]) -> Tuple[NetworkConfig, McConfig]:
    """
    Validates a scenario mapping and materializes every default.

    Missing n_hops means a single hop; missing reuse_sep means no spatial reuse (K = N).
    :raises ConfigurationError: on an unknown key or any violated invariant.
    """
    unknown = sorted(set(raw) - set(SCENARIO_KEYS))
    if unknown:
        raise ConfigurationError(unknown[0], "unknown key")

    n_hops = _integer(raw, "n_hops", 1)
    pdp = raw.get("pdp", ())
    if not isinstance(pdp, (list, tuple)):
        raise ConfigurationError("pdp", "must be a list of weights")
    if any(isinstance(w, bool) or not isinstance(w, (int, float)) for w in pdp):
        raise ConfigurationError("pdp", "weights must be numbers")
    cfg = NetworkConfig(
        n_hops=n_hops,
        reuse_sep=_integer(raw, "reuse_sep", n_hops),
        distance=_number(raw, "distance", settings.DEFAULT_DISTANCE),
        pathloss_exp=_number(raw, "pathloss_exp", settings.DEFAULT_PATHLOSS_EXP),
        n_tones=_integer(raw, "n_tones", 1),
        n_taps=_integer(raw, "n_taps", 1),
        pdp=tuple(pdp),
        fading=_fading_from(raw.get("fading")),
        snr=_number(raw, "snr", settings.DEFAULT_SNR),
    )

    seed = raw.get("seed")
    if seed is None:
        seed = generate_seed()
        logger.info("No seed given; generated seed %d", seed)
    mc = McConfig(
        trials=_integer(raw, "trials", settings.DEFAULT_TRIALS),
        seed=seed,
        target_rate=_number(raw, "target_rate", settings.DEFAULT_TARGET_RATE),
    )
    return cfg, mc


def parse_config(
    path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    command: str = "",
    options: Optional[Dict[str, Any]] = None,
) -> Tuple[NetworkConfig, McConfig, RunManifest]:
    """
    Reads a scenario file (plain or manifest-wrapped), applies inline overrides
    and returns the validated configs with their manifest.

    :param path: JSON scenario file, or None for defaults only.
    :param overrides: Keys that replace file values; None values are ignored.
    :param command: Name of the command the manifest describes.
    :param options: Command options that influence results.
    """
    raw = _read_file(path) if path else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value

    cfg, mc = build_configs(raw)
    resolved = cfg.to_dict()
    resolved.update({"trials": mc.trials, "seed": mc.seed, "target_rate": mc.target_rate})
    manifest = RunManifest(config=resolved, seed=mc.seed, command=command, options=dict(options or {}))
    logger.debug("Resolved scenario %s (manifest %s)", resolved, manifest.digest)
    return cfg, mc, manifest

import math
import os

from dotenv import load_dotenv

# Load environment variables from a .env file (if present)
load_dotenv()

TOOL_VERSION = "1.0.0"

# ===== Geometry and Propagation =====
DEFAULT_DISTANCE = float(os.getenv("DEFAULT_DISTANCE", 1.0))  # D, source-destination distance
DEFAULT_PATHLOSS_EXP = float(os.getenv("DEFAULT_PATHLOSS_EXP", 4.0))  # p
DEFAULT_SNR = float(os.getenv("DEFAULT_SNR", 1.0))  # linear, 0 dB end-to-end

# ===== Fading (per-tap Ricean law before PDP scaling) =====
DEFAULT_TAP_MEAN_RE = float(os.getenv("DEFAULT_TAP_MEAN_RE", 1.0 / math.sqrt(2.0)))
DEFAULT_TAP_MEAN_IM = float(os.getenv("DEFAULT_TAP_MEAN_IM", 0.0))
DEFAULT_TAP_VARIANCE = float(os.getenv("DEFAULT_TAP_VARIANCE", 0.5))

# ===== Monte Carlo Engine =====
DEFAULT_TRIALS = int(os.getenv("DEFAULT_TRIALS", 10000))
DEFAULT_TARGET_RATE = float(os.getenv("DEFAULT_TARGET_RATE", 0.5))  # nats/s/Hz
MAX_WORKERS = int(os.getenv("MAX_WORKERS", 4))
TRIAL_CHUNK_SIZE = int(os.getenv("TRIAL_CHUNK_SIZE", 1024))
CDF_GRID_POINTS = int(os.getenv("CDF_GRID_POINTS", 501))

# ===== Low-SNR Numerical Limits =====
PROBE_SNR = float(os.getenv("PROBE_SNR", 1e-8))  # per-hop SNR, divided by the scenario snr_gain
PROBE_STEP_RATIO = float(os.getenv("PROBE_STEP_RATIO", 0.5))  # step = ratio * probe

# ===== Logging and Output =====
LOGGING_LEVEL = os.getenv("LOGGING_LEVEL", "INFO")
LOG_DIR = os.getenv("LOG_DIR", "./logs")
LOG_FILE = os.getenv("LOG_FILE", "multihop_simulator.log")
OUTPUT_DIR = os.getenv("OUTPUT_DIR", "./results")


# ===== Validation for Critical Settings =====
def validate_settings():
    """
    Validates critical settings to ensure they are within acceptable ranges.
    """
    if DEFAULT_DISTANCE <= 0:
        raise ValueError("DEFAULT_DISTANCE must be positive.")

    if DEFAULT_PATHLOSS_EXP < 2:
        raise ValueError("DEFAULT_PATHLOSS_EXP must be at least 2.")

    if DEFAULT_SNR <= 0:
        raise ValueError("DEFAULT_SNR must be positive.")

    if DEFAULT_TAP_VARIANCE <= 0:
        raise ValueError("DEFAULT_TAP_VARIANCE must be positive.")

    if DEFAULT_TRIALS < 1:
        raise ValueError("DEFAULT_TRIALS must be at least 1.")

    if DEFAULT_TARGET_RATE < 0:
        raise ValueError("DEFAULT_TARGET_RATE must be nonnegative.")

    if MAX_WORKERS < 1 or TRIAL_CHUNK_SIZE < 1:
        raise ValueError("MAX_WORKERS and TRIAL_CHUNK_SIZE must be positive integers.")

    if CDF_GRID_POINTS < 2:
        raise ValueError("CDF_GRID_POINTS must be at least 2.")

    if not (0 < PROBE_SNR < 1e-3):
        raise ValueError("PROBE_SNR must lie in (0, 1e-3) to stay in the linear regime.")

    if not (0 < PROBE_STEP_RATIO < 1):
        raise ValueError("PROBE_STEP_RATIO must lie in (0, 1).")

    if LOGGING_LEVEL.upper() not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
        raise ValueError(f"Unknown LOGGING_LEVEL: {LOGGING_LEVEL}")


validate_settings()

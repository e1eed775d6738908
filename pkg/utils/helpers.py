import datetime
import hashlib
import json
import logging
import math
from typing import Any, Dict, Union

import numpy as np
import pytz

logger = logging.getLogger("helpers")

ArrayLike = Union[float, np.ndarray]


class Helpers:
    """
    A utility class for small repeated tasks: dB conversion, unit conversion,
    canonical JSON, hashing and timestamps.
    """

    @staticmethod
    def to_db(value: ArrayLike) -> ArrayLike:
        """
        Converts a linear power ratio to decibels (10·log10).

        Args:
            value (float | np.ndarray): Linear power ratio. Zero maps to -inf and inf to inf.

        Returns:
            float | np.ndarray: The ratio in dB.
        """
        with np.errstate(divide="ignore"):
            result = 10.0 * np.log10(value)
        return float(result) if np.ndim(result) == 0 else result

    @staticmethod
    def nats_to_bits(value: ArrayLike) -> ArrayLike:
        """Converts nats/s/Hz to b/s/Hz."""
        result = np.asarray(value, dtype=float) / math.log(2.0)
        return float(result) if np.ndim(result) == 0 else result

    @staticmethod
    def complex_to_pairs(values: np.ndarray) -> Any:
        """
        Converts a complex array to nested lists with [re, im] leaves for JSON output.

        Args:
            values (np.ndarray): Complex array of any shape.

        Returns:
            list: Nested lists mirroring the array shape.
        """
        arr = np.asarray(values, dtype=complex)
        return np.stack([arr.real, arr.imag], axis=-1).tolist()

    @staticmethod
    def pairs_to_complex(pairs: Any) -> np.ndarray:
        """Inverse of `complex_to_pairs`."""
        arr = np.asarray(pairs, dtype=float)
        if arr.ndim == 0 or arr.shape[-1] != 2:
            raise ValueError("Complex values must be encoded as [re, im] pairs.")
        return arr[..., 0] + 1j * arr[..., 1]

    @staticmethod
    def canonical_json(payload: Dict[str, Any]) -> str:
        """Serializes a mapping with sorted keys and no insignificant whitespace."""
        return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=Helpers._json_default)

    @staticmethod
    def stable_hash(payload: Dict[str, Any]) -> str:
        """
        Returns the SHA-256 hex digest of the canonical JSON form of `payload`.

        Args:
            payload (Dict[str, Any]): JSON-serializable mapping.

        Returns:
            str: Hex digest.
        """
        digest = hashlib.sha256(Helpers.canonical_json(payload).encode("utf-8")).hexdigest()
        logger.debug("Computed payload hash %s", digest)
        return digest

    @staticmethod
    def utc_timestamp() -> str:
        """Current time as an ISO-8601 string in UTC."""
        return datetime.datetime.now(pytz.UTC).isoformat()

    @staticmethod
    def _json_default(value: Any) -> Any:
        if isinstance(value, np.generic):
            return value.item()
        if isinstance(value, np.ndarray):
            return value.tolist()
        raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")

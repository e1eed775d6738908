import json
import logging
import os
from io import StringIO
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from network.channel import ChannelRealization
from utils.helpers import Helpers

HASH_PREFIX = "# manifest_hash: "
FLOAT_FORMAT = "%.17g"


def _format_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


class Reporting:
    """
    Writes result tables and summaries of one run.

    Every file carries the hash of the run manifest. CSV files start with a
    `# manifest_hash:` comment line followed by the header row, use 17
    significant digits and LF line endings. JSON files embed the manifest itself.
    """

    def __init__(self, out_dir: str, manifest):
        """
        :param out_dir: Output directory, created if missing.
        :param manifest: RunManifest of the run (anything with `digest` and `to_dict()`).
        """
        self.out_dir = out_dir
        self.manifest = manifest
        self.logger = logging.getLogger("Reporting")
        os.makedirs(self.out_dir, exist_ok=True)

    def log_event(self, message, level="info"):
        """
        Log a significant event.

        :param message: Event message.
        :param level: Log level ('info', 'warning', 'error').
        """
        levels = {"info": logging.INFO, "warning": logging.WARNING, "error": logging.ERROR}
        self.logger.log(levels.get(level, logging.INFO), message)

    def _path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def write_csv(self, name: str, frame: pd.DataFrame, footer: Optional[Dict[str, Any]] = None) -> str:
        """
        Writes `frame` as CSV; `footer` entries become trailing `# key: value` lines.

        :return: Path of the written file.
        """
        path = self._path(name)
        try:
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(f"{HASH_PREFIX}{self.manifest.digest}\n")
                frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
                for key, value in (footer or {}).items():
                    f.write(f"# {key}: {_format_value(value)}\n")
            self.logger.info(f"Wrote {len(frame)} rows to {path}.")
            return path
        except Exception as e:
            self.logger.error(f"Error writing {path}: {e}")
            raise

    def write_json(self, name: str, payload: Dict[str, Any]) -> str:
        """Writes `payload` with the manifest embedded under the `manifest` key."""
        path = self._path(name)
        document = {"manifest": self.manifest.to_dict()}
        document.update(payload)
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                json.dump(document, f, indent=2, sort_keys=True, default=Helpers._json_default)
                f.write("\n")
            self.logger.info(f"Wrote summary to {path}.")
            return path
        except Exception as e:
            self.logger.error(f"Error writing {path}: {e}")
            raise

    def write_channel(self, name: str, realization: ChannelRealization) -> str:
        """Dumps taps as [re, im] pairs for debugging or later replay."""
        return self.write_json(
            name,
            {
                "channel": {
                    "signal_taps": Helpers.complex_to_pairs(realization.signal_taps),
                    "interference_taps": Helpers.complex_to_pairs(realization.interference_taps),
                    "interference_shape": list(realization.interference_taps.shape),
                }
            },
        )

    @staticmethod
    def read_channel(path: str) -> ChannelRealization:
        """Loads a realization written by `write_channel`."""
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
        channel = payload.get("channel", payload)
        try:
            signal = Helpers.pairs_to_complex(channel["signal_taps"])
            raw = channel["interference_taps"]
            if np.asarray(raw).size == 0:
                # M = 1: empty pair lists carry no shape.
                interference = np.zeros(tuple(channel["interference_shape"]), dtype=complex)
            else:
                interference = Helpers.pairs_to_complex(raw)
        except KeyError as e:
            raise ValueError(f"Channel file {path} lacks {e}.") from e
        return ChannelRealization(signal_taps=signal, interference_taps=interference)

    @staticmethod
    def read_csv(path: str):
        """
        Reads a CSV written by `write_csv`.

        :return: (manifest hash, table, footer dict of strings)
        """
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().split("\n")
        if not lines or not lines[0].startswith(HASH_PREFIX):
            raise ValueError(f"{path} does not start with a manifest hash line.")
        digest = lines[0][len(HASH_PREFIX):]
        body = [line for line in lines[1:] if line and not line.startswith("#")]
        footer = {}
        for line in lines[1:]:
            if line.startswith("# "):
                key, _, value = line[2:].partition(": ")
                footer[key] = value
        table = pd.read_csv(StringIO("\n".join(body)), float_precision="round_trip")
        return digest, table, footer

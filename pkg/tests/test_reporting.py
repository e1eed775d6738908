"""
Unit Tests for the Reporting module.
"""

import json
import os
import tempfile
import unittest
from unittest.mock import patch

import numpy as np
import pandas as pd

from config.scenario import parse_config
from network.channel import draw_realization, trial_rng
from network.topology import NetworkConfig, build_reuse_plan
from performance.reporting import HASH_PREFIX, Reporting


class TestReporting(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        _, _, self.manifest = parse_config(overrides={"n_hops": 4, "reuse_sep": 2, "seed": 12}, command="test")
        self.reporting = Reporting(os.path.join(self.tmp.name, "out"), self.manifest)

    def test_csv_layout(self):
        frame = pd.DataFrame({"snr": [0.1, 1.0], "I": [1 / 3, 2.0]})
        path = self.reporting.write_csv("t.csv", frame, footer={"s0_closed": 0.5, "strategy": "fixed"})
        with open(path, "rb") as f:
            raw = f.read()
        self.assertNotIn(b"\r", raw)
        lines = raw.decode("utf-8").split("\n")
        self.assertEqual(lines[0], f"{HASH_PREFIX}{self.manifest.digest}")
        self.assertEqual(lines[1], "snr,I")
        self.assertEqual(lines[2], "0.10000000000000001,0.33333333333333331")
        self.assertEqual(lines[4], "# s0_closed: 0.5")
        self.assertEqual(lines[5], "# strategy: fixed")

    def test_csv_reads_back_exactly(self):
        values = np.random.default_rng(0).random(20)
        path = self.reporting.write_csv("r.csv", pd.DataFrame({"value": values}), footer={"note": "x"})
        digest, table, footer = Reporting.read_csv(path)
        self.assertEqual(digest, self.manifest.digest)
        np.testing.assert_array_equal(table["value"].to_numpy(), values)
        self.assertEqual(footer, {"note": "x"})

    def test_read_csv_requires_hash_line(self):
        path = os.path.join(self.tmp.name, "plain.csv")
        with open(path, "w", encoding="utf-8") as f:
            f.write("a,b\n1,2\n")
        with self.assertRaises(ValueError):
            Reporting.read_csv(path)

    def test_json_embeds_manifest(self):
        path = self.reporting.write_json("s.json", {"statistics": {"mean": np.float64(1.5)}})
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
        self.assertEqual(payload["manifest"]["manifest_hash"], self.manifest.digest)
        self.assertEqual(payload["manifest"]["config"]["seed"], 12)
        self.assertEqual(payload["statistics"]["mean"], 1.5)

    def test_channel_round_trip(self):
        for n_hops, reuse_sep in ((4, 2), (4, 4)):
            with self.subTest(N=n_hops, K=reuse_sep):
                cfg = NetworkConfig(n_hops=n_hops, reuse_sep=reuse_sep, n_tones=4, n_taps=2)
                real = draw_realization(cfg, build_reuse_plan(cfg), trial_rng(1, 0))
                path = self.reporting.write_channel(f"ch_{reuse_sep}.json", real)
                loaded = Reporting.read_channel(path)
                np.testing.assert_array_equal(loaded.signal_taps, real.signal_taps)
                np.testing.assert_array_equal(loaded.interference_taps, real.interference_taps)
                self.assertEqual(loaded.interference_taps.shape, real.interference_taps.shape)

    def test_channel_file_without_taps(self):
        path = os.path.join(self.tmp.name, "empty.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"channel": {"signal_taps": [[[1.0, 0.0]]]}}, f)
        with self.assertRaises(ValueError):
            Reporting.read_channel(path)

    @patch("logging.Logger.log")
    def test_log_event(self, mock_log):
        self.reporting.log_event("Test event", level="warning")
        mock_log.assert_called_once()


if __name__ == "__main__":
    unittest.main()

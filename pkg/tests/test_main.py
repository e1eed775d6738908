"""
Unit Tests for the command-line entry point.
"""

import json
import math
import os
import tempfile
import unittest
from unittest.mock import patch

import numpy as np

from config.scenario import parse_config
from main import main, parse_float_list, parse_int_list, parse_snr_grid
from network.channel import ChannelRealization
from performance.reporting import Reporting
from utils.exception_handler import ConfigurationError


class TestArgumentHelpers(unittest.TestCase):

    def test_snr_grid(self):
        grid = parse_snr_grid("1e-8:10:46")
        self.assertEqual(grid.size, 46)
        self.assertAlmostEqual(grid[0], 1e-8)
        self.assertAlmostEqual(grid[-1], 10.0)
        np.testing.assert_allclose(grid[1:] / grid[:-1], grid[1] / grid[0])

    def test_bad_snr_grids(self):
        for text in ("1:2", "0:1:5", "2:1:5", "1e-3:1:1", "a:b:c"):
            with self.subTest(text=text):
                with self.assertRaises(ConfigurationError):
                    parse_snr_grid(text)

    def test_lists(self):
        self.assertEqual(parse_int_list("4, 16,64", "n_list"), [4, 16, 64])
        self.assertEqual(parse_float_list("0.01,0.1", "p_out"), [0.01, 0.1])
        with self.assertRaises(ConfigurationError):
            parse_int_list("4,0", "n_list")
        with self.assertRaises(ConfigurationError):
            parse_float_list("0.5,1.0", "p_out")


class TestCommands(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.out = os.path.join(self.tmp.name, "out")
        printer = patch("builtins.print")
        printer.start()
        self.addCleanup(printer.stop)
        _, _, self.manifest = parse_config(overrides={"seed": 0}, command="test")

    def _scenario(self, payload, name="scenario.json"):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f)
        return path

    def _out(self, name, out=None):
        return os.path.join(out or self.out, name)

    def test_tradeoff_single_hop_reference_channel(self):
        channel = os.path.join(self.tmp.name, "channel")
        Reporting(channel, self.manifest).write_channel(
            "unit.json",
            ChannelRealization(signal_taps=np.array([[1.0 + 0j]]), interference_taps=np.zeros((1, 0, 1), dtype=complex)),
        )
        config = self._scenario({"n_hops": 1, "seed": 1})
        status = main(["tradeoff", "--config", config, "--channel", os.path.join(channel, "unit.json"), "--out", self.out])
        self.assertEqual(status, 0)
        _, table, footer = Reporting.read_csv(self._out("tradeoff.csv"))
        self.assertAlmostEqual(table["ebn0_fixed_dB"].iloc[0], 10 * math.log10(math.log(2.0)), delta=1e-3)
        self.assertTrue(np.all(np.diff(table["I_adaptive"]) > 0))
        self.assertAlmostEqual(float(footer["s0_closed"]), 2.0)
        self.assertTrue(os.path.exists(self._out("tradeoff_footer.json")))

    def test_tradeoff_dumped_channel_replays_identically(self):
        config = self._scenario({"n_hops": 8, "reuse_sep": 4, "n_tones": 4, "n_taps": 2, "seed": 5})
        first = os.path.join(self.tmp.name, "first")
        second = os.path.join(self.tmp.name, "second")
        self.assertEqual(main(["tradeoff", "--config", config, "--out", first, "--dump-channel", "ch.json"]), 0)
        self.assertEqual(
            main(["tradeoff", "--config", config, "--out", second, "--channel", os.path.join(first, "ch.json")]), 0
        )
        _, drawn, drawn_footer = Reporting.read_csv(self._out("tradeoff.csv", first))
        _, replayed, replayed_footer = Reporting.read_csv(self._out("tradeoff.csv", second))
        self.assertTrue(drawn.equals(replayed))
        self.assertEqual(drawn_footer, replayed_footer)
        self.assertTrue(np.all(drawn["I_fixed"] <= drawn["I_adaptive"]))

    def test_tradeoff_with_distant_terminals(self):
        config = self._scenario({"n_hops": 1, "distance": 100.0, "seed": 3})
        self.assertEqual(main(["tradeoff", "--config", config, "--snr-grid", "1:1e10:11", "--out", self.out]), 0)
        _, _, footer = Reporting.read_csv(self._out("tradeoff.csv"))
        self.assertAlmostEqual(float(footer["s0_numeric_fixed"]), 2.0, delta=2e-2)
        closed = float(footer["ebn0_min_fixed"])
        self.assertLess(abs(float(footer["ebn0_min_numeric_fixed"]) - closed) / closed, 1e-3)

    def test_tradeoff_rejects_mismatched_channel(self):
        channel = os.path.join(self.tmp.name, "channel")
        Reporting(channel, self.manifest).write_channel(
            "one.json",
            ChannelRealization(signal_taps=np.ones((1, 1), dtype=complex), interference_taps=np.zeros((1, 0, 1), dtype=complex)),
        )
        config = self._scenario({"n_hops": 2, "seed": 1})
        status = main(["tradeoff", "--config", config, "--channel", os.path.join(channel, "one.json"), "--out", self.out])
        self.assertEqual(status, 1)

    def test_cdf_single_scenario(self):
        config = self._scenario({"n_hops": 8, "reuse_sep": 4, "n_tones": 4, "n_taps": 2})
        status = main(["cdf", "--config", config, "--seed", "3", "--trials", "300", "--rate", "0.5", "--out", self.out])
        self.assertEqual(status, 0)
        digest, table, _ = Reporting.read_csv(self._out("cdf_single.csv"))
        self.assertEqual(table["cdf_fixed"].iloc[-1], 1.0)
        self.assertTrue(np.all(table["cdf_adaptive"] <= table["cdf_fixed"]))
        with open(self._out("summary_single.json"), "r", encoding="utf-8") as f:
            summary = json.load(f)
        self.assertEqual(summary["manifest"]["manifest_hash"], digest)
        self.assertEqual(summary["manifest"]["config"]["seed"], 3)
        self.assertTrue(summary["cdf_dominance"])
        self.assertEqual(summary["n_trials"], 300)

    def test_cdf_summary_reproduces_run(self):
        config = self._scenario({"n_hops": 4, "reuse_sep": 2, "trials": 200, "seed": 8})
        self.assertEqual(main(["cdf", "--config", config, "--out", self.out]), 0)
        again = os.path.join(self.tmp.name, "again")
        self.assertEqual(main(["cdf", "--config", self._out("summary_single.json"), "--out", again, "--workers", "1"]), 0)
        with open(self._out("cdf_single.csv"), "rb") as f:
            original = f.read()
        with open(self._out("cdf_single.csv", again), "rb") as f:
            repeated = f.read()
        self.assertEqual(original, repeated)

    def test_cdf_grid_mode(self):
        status = main(["cdf", "--scenario", "grid", "--seed", "2", "--trials", "100", "--out", self.out])
        self.assertEqual(status, 0)
        digests = set()
        for label in ("N1_K1_flat", "N8_K4_flat", "N8_K8_flat", "N1_K1_selective", "N8_K4_selective", "N8_K8_selective"):
            digest, _, _ = Reporting.read_csv(self._out(f"cdf_{label}.csv"))
            digests.add(digest)
            with open(self._out(f"summary_{label}.json"), "r", encoding="utf-8") as f:
                self.assertEqual(json.load(f)["manifest"]["seed"], 2)
        self.assertEqual(len(digests), 6)

    def test_convergence_unit_power(self):
        status = main(["convergence", "--power-model", "unit", "--n-list", "4,8", "--trials", "50", "--seed", "1",
                       "--out", self.out])
        self.assertEqual(status, 0)
        _, chi, footer = Reporting.read_csv(self._out("convergence_chi.csv"))
        np.testing.assert_allclose(chi["mean_ratio"], 1.0, rtol=1e-12)
        np.testing.assert_allclose(chi["spread"], 0.0, atol=1e-12)
        self.assertAlmostEqual(float(footer["chi"]), 1.0)

    def test_convergence_exponential(self):
        status = main(["convergence", "--power-model", "exponential", "--n-list", "4,16", "--m-fixed", "2",
                       "--trials", "5000", "--seed", "1", "--out", self.out])
        self.assertEqual(status, 0)
        _, evt, footer = Reporting.read_csv(self._out("convergence_evt.csv"))
        np.testing.assert_allclose(evt["a_n"] * evt["n_hops"], 1.0, rtol=0.1)
        self.assertIn("ks_reference", evt.columns)
        self.assertEqual(footer["ks_nonincreasing"], "True")
        _, chi, chi_footer = Reporting.read_csv(self._out("convergence_chi.csv"))
        self.assertEqual(list(chi["n_slots"]), [2, 2])
        self.assertEqual(chi_footer["chi_integrability"], "divergent")

    def test_evt_outage_table(self):
        status = main(["evt", "--power-model", "exponential", "--n-list", "4,16", "--p-out", "0.01,0.1",
                       "--trials", "20000", "--seed", "4", "--out", self.out])
        self.assertEqual(status, 0)
        _, outage, _ = Reporting.read_csv(self._out("evt_outage.csv"))
        self.assertEqual(len(outage), 4)
        self.assertFalse(outage["flagged"].any())
        np.testing.assert_allclose(outage["ebn0_out_evt_dB"], outage["ebn0_out_empirical_dB"], atol=1.0)
        _, fits, _ = Reporting.read_csv(self._out("evt_fits.csv"))
        self.assertEqual(list(fits["n_hops"]), [4, 16])

    def test_invalid_configuration_exits_with_error(self):
        config = self._scenario({"n_hops": 8, "reuse_sep": 3})
        self.assertEqual(main(["cdf", "--config", config, "--out", self.out]), 1)
        self.assertEqual(main(["cdf", "--workers", "0", "--out", self.out]), 1)


if __name__ == "__main__":
    unittest.main()

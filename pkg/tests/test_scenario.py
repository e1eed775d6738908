"""
Unit Tests for scenario parsing and run manifests.
"""

import json
import os
import tempfile
import unittest

from config.scenario import RunManifest, build_configs, parse_config
from network.topology import FadingSpec
from utils.exception_handler import ConfigurationError


class TestBuildConfigs(unittest.TestCase):

    def test_valid_scenario_with_defaults(self):
        cfg, mc = build_configs({"n_hops": 8, "reuse_sep": 4, "n_tones": 4, "n_taps": 2, "seed": 1})
        self.assertEqual((cfg.n_hops, cfg.reuse_sep, cfg.n_tones, cfg.n_taps), (8, 4, 4, 2))
        self.assertEqual(cfg.distance, 1.0)
        self.assertEqual(cfg.pathloss_exp, 4.0)
        self.assertEqual(cfg.snr, 1.0)
        self.assertEqual(cfg.fading, FadingSpec())
        self.assertEqual(mc.seed, 1)

    def test_missing_sizes(self):
        cfg, _ = build_configs({"seed": 0})
        self.assertEqual((cfg.n_hops, cfg.reuse_sep), (1, 1))
        cfg, _ = build_configs({"n_hops": 4, "seed": 0})
        self.assertEqual(cfg.reuse_sep, 4)

    def test_invalid_scenarios_name_the_field(self):
        for raw, name in (
            ({"n_hops": 8, "reuse_sep": 3}, "reuse_sep"),
            ({"n_taps": 4, "n_tones": 2}, "n_taps"),
            ({"n_hops": 2, "colour": "red"}, "colour"),
            ({"fading": {"mean_re": 0.0, "kfactor": 3}}, "fading.kfactor"),
            ({"n_hops": "eight"}, "n_hops"),
            ({"n_tones": 2, "n_taps": 2, "pdp": ["half", 0.5]}, "pdp"),
            ({"n_tones": 2, "n_taps": 2, "pdp": [None, 1.0]}, "pdp"),
            ({"pdp": 1.0}, "pdp"),
            ({"snr": True}, "snr"),
            ({"trials": 0}, "trials"),
            ({"seed": -3}, "seed"),
        ):
            with self.subTest(raw=raw):
                with self.assertRaises(ConfigurationError) as ctx:
                    build_configs(raw)
                self.assertEqual(ctx.exception.field, name)

    def test_rayleigh_fading(self):
        cfg, _ = build_configs({"fading": {"mean_re": 0.0, "mean_im": 0.0, "variance": 1.0}, "seed": 0})
        self.assertTrue(cfg.fading.is_rayleigh)

    def test_missing_seed_is_generated(self):
        _, mc = build_configs({})
        self.assertGreaterEqual(mc.seed, 0)
        self.assertLess(mc.seed, 2 ** 64)


class TestParseConfig(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def _write(self, name, payload):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f)
        return path

    def test_overrides_replace_file_values(self):
        path = self._write("s.json", {"n_hops": 8, "reuse_sep": 4, "trials": 100, "seed": 7})
        cfg, mc, manifest = parse_config(path, overrides={"trials": 20, "seed": None})
        self.assertEqual(mc.trials, 20)
        self.assertEqual(mc.seed, 7)
        self.assertEqual(manifest.config["trials"], 20)
        self.assertEqual(manifest.config["reuse_sep"], 4)

    def test_generated_seed_is_recorded(self):
        _, mc, manifest = parse_config(None)
        self.assertEqual(manifest.seed, mc.seed)
        self.assertEqual(manifest.config["seed"], mc.seed)

    def test_manifest_wrapped_file_reproduces_scenario(self):
        cfg, mc, manifest = parse_config(overrides={"n_hops": 4, "reuse_sep": 2, "n_tones": 4, "n_taps": 2, "seed": 99})
        path = self._write("summary.json", {"manifest": manifest.to_dict(), "statistics": {}})
        cfg2, mc2, manifest2 = parse_config(path)
        self.assertEqual(cfg, cfg2)
        self.assertEqual(mc, mc2)
        self.assertEqual(manifest.digest, manifest2.digest)

    def test_unreadable_files(self):
        with self.assertRaises(ConfigurationError):
            parse_config(os.path.join(self.tmp.name, "missing.json"))
        bad = os.path.join(self.tmp.name, "bad.json")
        with open(bad, "w", encoding="utf-8") as f:
            f.write("{not json")
        with self.assertRaises(ConfigurationError):
            parse_config(bad)
        with self.assertRaises(ConfigurationError):
            parse_config(self._write("list.json", [1, 2]))
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(self._write("wrapped.json", {"manifest": {"seed": 1}}))
        self.assertEqual(ctx.exception.field, "manifest")


class TestRunManifest(unittest.TestCase):

    def test_timestamp_is_not_hashed(self):
        first = RunManifest(config={"n_hops": 1}, seed=1, timestamp="2024-01-01T00:00:00+00:00")
        second = RunManifest(config={"n_hops": 1}, seed=1, timestamp="2025-06-01T00:00:00+00:00")
        self.assertEqual(first.digest, second.digest)

    def test_config_and_options_are_hashed(self):
        base = RunManifest(config={"n_hops": 1}, seed=1)
        self.assertNotEqual(base.digest, RunManifest(config={"n_hops": 2}, seed=1).digest)
        self.assertNotEqual(base.digest, RunManifest(config={"n_hops": 1}, seed=1, options={"scenario": "a"}).digest)

    def test_to_dict(self):
        manifest = RunManifest(config={"n_hops": 1}, seed=5, command="cdf")
        payload = manifest.to_dict()
        self.assertEqual(payload["manifest_hash"], manifest.digest)
        self.assertEqual(payload["seed"], 5)
        self.assertIn("rate_units", payload["normalization"])

    def test_with_config(self):
        cfg, _, manifest = parse_config(overrides={"n_hops": 8, "reuse_sep": 4, "seed": 3}, command="cdf")
        derived = manifest.with_config(cfg.with_updates(reuse_sep=8), scenario="no-reuse")
        self.assertEqual(derived.config["reuse_sep"], 8)
        self.assertEqual(derived.config["seed"], 3)
        self.assertEqual(derived.options["scenario"], "no-reuse")
        self.assertNotEqual(derived.digest, manifest.digest)


if __name__ == "__main__":
    unittest.main()

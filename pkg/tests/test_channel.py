"""
Unit Tests for the channel module.
"""

import unittest

import numpy as np
from scipy import stats

from network.channel import (
    ChannelRealization,
    constant_power_sampler,
    draw_realization,
    exponential_power_sampler,
    hop_power_sampler,
    tones_from_taps,
    trial_rng,
    unit_realization,
)
from network.topology import FadingSpec, NetworkConfig, build_reuse_plan

RAYLEIGH = FadingSpec(tap_mean=0.0, tap_variance=1.0)


class TestToneResponse(unittest.TestCase):

    def test_single_tap_is_flat(self):
        real = ChannelRealization(
            signal_taps=np.array([[0.3 - 0.4j]]),
            interference_taps=np.zeros((1, 0, 1), dtype=complex),
        )
        tones = tones_from_taps(real, 4)
        np.testing.assert_allclose(tones.signal_tones, np.full((1, 4), 0.3 - 0.4j))
        np.testing.assert_allclose(tones.hop_power, [0.25])

    def test_delayed_tap_rotates_with_tone_index(self):
        real = ChannelRealization(
            signal_taps=np.array([[0.0, 1.0]], dtype=complex),
            interference_taps=np.zeros((1, 0, 2), dtype=complex),
        )
        tones = tones_from_taps(real, 4)
        # exp(-j2πw/4) for w = 1..4
        np.testing.assert_allclose(tones.signal_tones[0], [-1j, -1.0, 1j, 1.0], atol=1e-15)
        self.assertEqual(tones.interference_tones.shape, (1, 0, 4))

    def test_more_taps_than_tones_is_rejected(self):
        real = ChannelRealization(
            signal_taps=np.ones((2, 3), dtype=complex),
            interference_taps=np.zeros((2, 0, 3), dtype=complex),
        )
        with self.assertRaises(ValueError):
            tones_from_taps(real, 2)

    def test_parseval(self):
        cfg = NetworkConfig(n_hops=4, reuse_sep=2, n_tones=4, n_taps=2)
        plan = build_reuse_plan(cfg)
        for trial in range(1000):
            real = draw_realization(cfg, plan, trial_rng(11, trial))
            tones = tones_from_taps(real, cfg.n_tones)
            taps_power = np.sum(np.abs(real.signal_taps) ** 2, axis=-1)
            np.testing.assert_allclose(tones.hop_power, taps_power, rtol=1e-12, atol=0)

    def test_batched_realizations(self):
        cfg = NetworkConfig(n_hops=4, reuse_sep=2, n_tones=4, n_taps=2)
        plan = build_reuse_plan(cfg)
        stacked = ChannelRealization.stack([draw_realization(cfg, plan, trial_rng(0, t)) for t in range(5)])
        tones = tones_from_taps(stacked, 4)
        self.assertEqual(tones.signal_tones.shape, (5, 4, 4))
        self.assertEqual(tones.interference_tones.shape, (5, 4, 1, 4))
        self.assertEqual(tones.hop_power.shape, (5, 4))


class TestFadingLaw(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(2024)

    def test_mean_hop_power_is_one(self):
        for cfg in (
            NetworkConfig(n_hops=1, reuse_sep=1),
            NetworkConfig(n_hops=1, reuse_sep=1, n_tones=4, n_taps=2),
            NetworkConfig(n_hops=1, reuse_sep=1, n_tones=4, n_taps=3, pdp=(0.5, 0.3, 0.2), fading=RAYLEIGH),
        ):
            with self.subTest(cfg=cfg):
                powers = hop_power_sampler(cfg)(self.rng, (100000,))
                self.assertAlmostEqual(float(np.mean(powers)), 1.0, delta=0.01)

    def test_single_rayleigh_tap_is_exponential(self):
        cfg = NetworkConfig(n_hops=1, reuse_sep=1, fading=RAYLEIGH)
        powers = hop_power_sampler(cfg)(self.rng, (10000,))
        self.assertLess(stats.kstest(powers, stats.expon(scale=1.0).cdf).statistic, 0.02)

    def test_two_equal_rayleigh_taps_are_gamma(self):
        cfg = NetworkConfig(n_hops=1, reuse_sep=1, n_tones=4, n_taps=2, fading=RAYLEIGH)
        powers = hop_power_sampler(cfg)(self.rng, (10000,))
        self.assertLess(stats.kstest(powers, stats.gamma(a=2, scale=0.5).cdf).statistic, 0.02)

    def test_hops_are_uncorrelated(self):
        cfg = NetworkConfig(n_hops=2, reuse_sep=2)
        plan = build_reuse_plan(cfg)
        taps = np.array([draw_realization(cfg, plan, trial_rng(5, t)).signal_taps[:, 0] for t in range(50000)])
        a = taps[:, 0] - taps[:, 0].mean()
        b = taps[:, 1] - taps[:, 1].mean()
        rho = np.mean(a * np.conj(b)) / (a.std() * b.std())
        self.assertLess(abs(rho), 0.02)

    def test_reference_samplers(self):
        self.assertTrue(np.all(constant_power_sampler(2.0)(self.rng, (3, 4)) == 2.0))
        self.assertEqual(exponential_power_sampler(0.5)(self.rng, (7, 2)).shape, (7, 2))


class TestDeterminism(unittest.TestCase):

    def setUp(self):
        self.cfg = NetworkConfig(n_hops=8, reuse_sep=4, n_tones=4, n_taps=2)
        self.plan = build_reuse_plan(self.cfg)

    def test_same_seed_and_trial_reproduce(self):
        first = draw_realization(self.cfg, self.plan, trial_rng(42, 17))
        second = draw_realization(self.cfg, self.plan, trial_rng(42, 17))
        np.testing.assert_array_equal(first.signal_taps, second.signal_taps)
        np.testing.assert_array_equal(first.interference_taps, second.interference_taps)

    def test_trials_are_distinct(self):
        first = draw_realization(self.cfg, self.plan, trial_rng(42, 0))
        second = draw_realization(self.cfg, self.plan, trial_rng(42, 1))
        self.assertFalse(np.array_equal(first.signal_taps, second.signal_taps))

    def test_shapes(self):
        real = draw_realization(self.cfg, self.plan, trial_rng(0, 0))
        self.assertEqual(real.signal_taps.shape, (8, 2))
        self.assertEqual(real.interference_taps.shape, (8, 1, 2))

    def test_unit_realization(self):
        real = unit_realization(self.cfg, self.plan, trial_rng(0, 0))
        tones = tones_from_taps(real, self.cfg.n_tones)
        np.testing.assert_allclose(tones.hop_power, np.ones(8))
        self.assertFalse(np.any(real.interference_taps))


if __name__ == "__main__":
    unittest.main()

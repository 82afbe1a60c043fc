import numpy as np
import pytest

from paclab.channel import (SnrSpec, channel_llr, modulate, snr_to_sigma2,
                            transmit, trial_rng)


class TestSnrConversion:
    def test_ebn0_reference_point(self):
        spec = SnrSpec(snr_db=2.5, rate=0.5, convention="EbN0")
        assert snr_to_sigma2(spec) == pytest.approx(10 ** -0.25, rel=1e-12)
        assert snr_to_sigma2(spec) == pytest.approx(0.56234, abs=1e-5)

    def test_esn0_zero_db(self):
        assert snr_to_sigma2(SnrSpec(0.0, 0.5, "EsN0")) == pytest.approx(0.5)

    def test_conventions_coincide_at_rate_one(self):
        for snr in (-1.0, 0.0, 3.3):
            a = snr_to_sigma2(SnrSpec(snr, 1.0, "EbN0"))
            b = snr_to_sigma2(SnrSpec(snr, 1.0, "EsN0"))
            assert a == pytest.approx(b, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            SnrSpec(0.0, 0.0, "EbN0")
        with pytest.raises(ValueError):
            SnrSpec(0.0, 0.5, "Es/N0")


class TestModulate:
    def test_mapping(self):
        np.testing.assert_array_equal(modulate(np.array([0, 1])), [1.0, -1.0])

    def test_all_zero(self):
        np.testing.assert_array_equal(modulate(np.zeros(8, np.uint8)), np.ones(8))

    def test_noiseless_sign_roundtrip(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, 64)
        s = modulate(bits)
        np.testing.assert_array_equal((s < 0).astype(int), bits)


class TestTransmit:
    def test_vanishing_noise(self):
        s = modulate(np.array([0, 1, 1, 0]))
        y = transmit(s, 1e-30, trial_rng(0, 0, 1))
        np.testing.assert_allclose(y, s, atol=1e-12)

    def test_deterministic_given_seed(self):
        s = np.zeros(32)
        y1 = transmit(s, 0.5, trial_rng(42, 3, 1))
        y2 = transmit(s, 0.5, trial_rng(42, 3, 1))
        np.testing.assert_array_equal(y1, y2)

    def test_streams_are_order_independent(self):
        a_then_b = (transmit(np.zeros(4), 1.0, trial_rng(1, 0, 1)),
                    transmit(np.zeros(4), 1.0, trial_rng(1, 1, 1)))
        b_then_a = (transmit(np.zeros(4), 1.0, trial_rng(1, 1, 1)),
                    transmit(np.zeros(4), 1.0, trial_rng(1, 0, 1)))
        np.testing.assert_array_equal(a_then_b[0], b_then_a[1])
        np.testing.assert_array_equal(a_then_b[1], b_then_a[0])

    def test_noise_mean_clt(self):
        sigma2 = 0.7
        draws = transmit(np.zeros(10 ** 6), sigma2, trial_rng(9, 0, 1))
        assert abs(draws.mean()) < 4.0 * np.sqrt(sigma2) / 1000.0

    def test_rejects_nonpositive_sigma2(self):
        with pytest.raises(ValueError):
            transmit(np.zeros(4), 0.0, trial_rng(0, 0, 1))


class TestChannelLlr:
    def test_zero_observation(self):
        assert channel_llr(np.array([0.0]), 0.5)[0] == 0.0

    def test_reference_value(self):
        assert channel_llr(np.array([1.0]), 0.5)[0] == pytest.approx(4.0)

    def test_llr_sign_matches_bits_noiselessly(self):
        bits = np.array([0, 1, 0, 1, 1])
        llr = channel_llr(modulate(bits), 0.25)
        np.testing.assert_array_equal((llr < 0).astype(int), bits)

    def test_empirical_mean_on_all_zero(self):
        sigma2 = 0.5
        y = transmit(modulate(np.zeros(10 ** 6, np.uint8)), sigma2, trial_rng(4, 0, 1))
        llr = channel_llr(y, sigma2)
        assert abs(llr.mean() - 2.0 / sigma2) < 0.01 * 2.0 / sigma2

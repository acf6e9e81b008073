import numpy as np

from ahrelay.phy.channel import TYPICAL_URBAN, channel_apply
from ahrelay.phy.ofdm import data_tones, ofdm_demodulate, ofdm_modulate, symbols_to_bits
from ahrelay.phy.receiver import equalize_and_decide, null_tones, repetition_combine


def test_noiseless_any_channel_recovers_bits():
    g = np.random.default_rng(0)
    bits = g.integers(0, 2, (200, 48)).astype(bool)
    rx, h = channel_apply(ofdm_modulate(bits), TYPICAL_URBAN, g)
    y = data_tones(ofdm_demodulate(rx))
    hd = data_tones(h)[:, None, :]
    np.testing.assert_array_equal(symbols_to_bits(equalize_and_decide(y, hd)), bits)
    np.testing.assert_array_equal(symbols_to_bits(repetition_combine(y, y, hd, hd)), bits)


def test_combiner_is_mrc():
    # a weak, wrong copy must not outvote a strong, right one
    y_strong, h_strong = np.array([2.0 + 0j]), np.array([2.0 + 0j])
    y_weak, h_weak = np.array([-0.1 + 0j]), np.array([0.05 + 0j])
    assert not repetition_combine(y_strong, y_weak, h_strong, h_weak)[0]


def test_null_tone_flagged():
    h = np.array([1.0, 0.0, 1e-13, 0.5j])
    np.testing.assert_array_equal(null_tones(h), [False, True, True, False])
    out = equalize_and_decide(np.ones(4), h)
    assert out.shape == (4,)

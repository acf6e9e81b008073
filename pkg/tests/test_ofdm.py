import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ahrelay.errors import DomainError
from ahrelay.phy.ofdm import (
    DATA_INDICES,
    PILOT_INDICES,
    bpsk_map,
    data_tones,
    ofdm_demodulate,
    ofdm_modulate,
    symbols_to_bits,
    tone_bins,
)


def test_tone_plan():
    data, pilots = tone_bins()
    assert len(data) == 24 and len(pilots) == 2
    assert 0 not in data and 0 not in pilots
    assert len(set(data) | set(pilots)) == 26
    assert set(DATA_INDICES).isdisjoint(PILOT_INDICES)


def test_all_zero_bits():
    block = ofdm_modulate(np.zeros(24, dtype=bool))
    assert block.shape == (1, 40)
    tones = ofdm_demodulate(block)[0]
    data, pilots = tone_bins()
    np.testing.assert_allclose(tones[data], 1.0, atol=1e-12)
    np.testing.assert_allclose(tones[pilots], 1.0, atol=1e-12)
    unused = np.setdiff1d(np.arange(32), np.concatenate((data, pilots)))
    np.testing.assert_allclose(tones[unused], 0.0, atol=1e-12)
    grid = np.zeros(32, complex)
    grid[data] = 1.0
    grid[pilots] = 1.0
    np.testing.assert_allclose(block[0, 8:], np.fft.ifft(grid, norm="ortho"))


def test_cyclic_prefix_is_tail():
    block = ofdm_modulate(np.random.default_rng(1).integers(0, 2, 48))
    np.testing.assert_array_equal(block[..., :8], block[..., -8:])


@pytest.mark.parametrize("n", [0, 23, 25, 50])
def test_length_mismatch(n):
    with pytest.raises(DomainError):
        ofdm_modulate(np.zeros(n, dtype=bool))


def test_demodulate_wrong_length():
    with pytest.raises(DomainError):
        ofdm_demodulate(np.zeros(32))


def test_bpsk_map():
    np.testing.assert_array_equal(bpsk_map([0, 1, 1, 0]), [1.0, -1.0, -1.0, 1.0])


bit_arrays = st.integers(1, 6).flatmap(lambda k: arrays(np.bool_, (24 * k,)))


@settings(max_examples=100)
@given(bits=bit_arrays)
def test_round_trip(bits):
    tones = data_tones(ofdm_demodulate(ofdm_modulate(bits)))
    decided = symbols_to_bits(tones.real < 0)
    np.testing.assert_array_equal(decided, bits)


@settings(max_examples=100)
@given(bits=bit_arrays)
def test_parseval(bits):
    block = ofdm_modulate(bits)
    useful = block[..., 8:]
    tones = np.fft.fft(useful, axis=-1, norm="ortho")
    e_time = np.sum(np.abs(useful) ** 2)
    e_freq = np.sum(np.abs(tones) ** 2)
    assert e_time == pytest.approx(e_freq, rel=1e-9)
    assert e_freq == pytest.approx(26 * block.shape[0], rel=1e-9)


def test_batched_shapes():
    bits = np.random.default_rng(0).integers(0, 2, (5, 3, 48)).astype(bool)
    block = ofdm_modulate(bits)
    assert block.shape == (5, 3, 2, 40)
    assert ofdm_demodulate(block).shape == (5, 3, 2, 32)

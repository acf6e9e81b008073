"""1 MHz S1G OFDM symbol mapping: 32-point transform, 24 data + 2 pilot tones, 8-sample CP."""

from __future__ import annotations

import numpy as np

from ..catalog import OfdmNumerology
from ..errors import DomainError

DEFAULT_NUMEROLOGY = OfdmNumerology()

# logical subcarrier indices for the 1 MHz mode; DC and edge tones are null
PILOT_INDICES = (-7, 7)
OCCUPIED_INDICES = tuple(k for k in range(-13, 14) if k != 0)
DATA_INDICES = tuple(k for k in OCCUPIED_INDICES if k not in PILOT_INDICES)


def tone_bins(numerology: OfdmNumerology = DEFAULT_NUMEROLOGY):
    """FFT bin numbers of the data and pilot tones."""
    n = numerology.fft_size
    if numerology.data_tones != len(DATA_INDICES) or numerology.pilot_tones != len(PILOT_INDICES):
        raise DomainError("only the 1 MHz tone plan (24 data + 2 pilots) is supported")
    data = np.array([k % n for k in DATA_INDICES])
    pilots = np.array([k % n for k in PILOT_INDICES])
    return data, pilots


def bpsk_map(bits) -> np.ndarray:
    """Bit 0 -> +1, bit 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=float)


def ofdm_modulate(bits, numerology: OfdmNumerology = DEFAULT_NUMEROLOGY) -> np.ndarray:
    """Map BPSK bits onto OFDM symbols and return time blocks with cyclic prefix.

    ``bits`` has a trailing dimension that is a multiple of 24; the output
    replaces it with ``(n_symbols, fft_size + cp)``. The transform is
    unitary, so each occupied tone carries unit energy.
    """
    bits = np.asarray(bits)
    n_data = numerology.data_tones
    if bits.ndim == 0 or bits.shape[-1] == 0 or bits.shape[-1] % n_data:
        raise DomainError(f"bit count must be a positive multiple of {n_data}, got shape {bits.shape}")
    data_bins, pilot_bins = tone_bins(numerology)
    n_sym = bits.shape[-1] // n_data
    grid = np.zeros(bits.shape[:-1] + (n_sym, numerology.fft_size), dtype=complex)
    grid[..., data_bins] = bpsk_map(bits).reshape(bits.shape[:-1] + (n_sym, n_data))
    grid[..., pilot_bins] = 1.0
    time = np.fft.ifft(grid, axis=-1, norm="ortho")
    cp = numerology.cp_samples
    return np.concatenate((time[..., -cp:], time), axis=-1)


def ofdm_demodulate(block, numerology: OfdmNumerology = DEFAULT_NUMEROLOGY) -> np.ndarray:
    """Strip the cyclic prefix and return the full 32-bin tone vector per symbol."""
    block = np.asarray(block)
    cp = numerology.cp_samples
    if block.shape[-1] != numerology.fft_size + cp:
        raise DomainError(f"expected blocks of {numerology.fft_size + cp} samples, got {block.shape[-1]}")
    return np.fft.fft(block[..., cp:], axis=-1, norm="ortho")


def data_tones(tones, numerology: OfdmNumerology = DEFAULT_NUMEROLOGY) -> np.ndarray:
    data_bins, _ = tone_bins(numerology)
    return np.asarray(tones)[..., data_bins]


def symbols_to_bits(decided_symbols) -> np.ndarray:
    """Flatten ``(..., n_sym, 24)`` decisions into ``(..., n_sym * 24)``."""
    d = np.asarray(decided_symbols)
    return d.reshape(d.shape[:-2] + (d.shape[-2] * d.shape[-1],))

"""Tapped-delay-line block-fading channel with an optional Rician line-of-sight tap."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..catalog import OfdmNumerology
from ..errors import DomainError
from .ofdm import DEFAULT_NUMEROLOGY


@dataclass(frozen=True)
class PowerDelayProfile:
    """Tap delays in samples (1 sample = 1 us at 1 MHz) and linear mean powers.

    Powers must sum to one. ``los_k_db`` puts a deterministic line-of-sight
    component on tap 0, taking ``K/(K+1)`` of that tap's power; ``inf``
    makes tap 0 fully deterministic.
    """

    delays: Tuple[int, ...]
    powers: Tuple[float, ...]
    los_k_db: Optional[float] = None
    name: str = "custom"

    def __post_init__(self):
        delays = tuple(int(d) for d in self.delays)
        powers = tuple(float(p) for p in self.powers)
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "powers", powers)
        if not delays or len(delays) != len(powers):
            raise DomainError("delays and powers must be non-empty and of equal length")
        if min(delays) < 0 or len(set(delays)) != len(delays):
            raise DomainError(f"delays must be distinct non-negative integers, got {delays}")
        if min(powers) < 0 or abs(sum(powers) - 1.0) > 1e-9:
            raise DomainError(f"tap powers must be non-negative and sum to 1, got sum {sum(powers)}")
        if self.los_k_db is not None and math.isnan(self.los_k_db):
            raise DomainError("LOS K factor must not be NaN")

    @classmethod
    def normalized(cls, delays: Sequence[int], powers: Sequence[float], **kw) -> "PowerDelayProfile":
        p = np.asarray(powers, dtype=float)
        return cls(tuple(delays), tuple(p / p.sum()), **kw)

    @property
    def max_delay(self) -> int:
        return max(self.delays)

    @property
    def los_fraction(self) -> float:
        """Share of tap-0 power carried by the deterministic component."""
        if self.los_k_db is None:
            return 0.0
        if self.los_k_db == math.inf:
            return 1.0
        k = 10.0 ** (self.los_k_db / 10.0)
        return k / (k + 1.0)

    def with_los(self, k_db: Optional[float]) -> "PowerDelayProfile":
        return replace(self, los_k_db=k_db)

    def check_fits(self, numerology: OfdmNumerology = DEFAULT_NUMEROLOGY) -> None:
        if self.max_delay >= numerology.cp_samples:
            raise DomainError(
                f"tap delay {self.max_delay} samples is not shorter than the {numerology.cp_samples}-sample guard interval"
            )


def exponential_pdp(n_taps: int = 6, decay_samples: float = 1.0, name: str = "exponential") -> PowerDelayProfile:
    """Taps at 0..n-1 samples with powers proportional to ``exp(-l / decay)``."""
    l = np.arange(n_taps)
    return PowerDelayProfile.normalized(tuple(l), np.exp(-l / decay_samples), name=name)


# Six taps spaced 1 us with a 1 us decay constant: an urban-macro style
# profile whose echoes all land inside the 8 us guard interval.
TYPICAL_URBAN = exponential_pdp(6, 1.0, name="tu-exp6")
FLAT = PowerDelayProfile((0,), (1.0,), name="flat")


def draw_taps(pdp: PowerDelayProfile, shape, rng: np.random.Generator) -> np.ndarray:
    """Complex tap gains of shape ``shape + (max_delay + 1,)``, zero at unused delays."""
    shape = tuple(np.atleast_1d(shape)) if not isinstance(shape, tuple) else shape
    n_taps = len(pdp.delays)
    std = np.sqrt(np.asarray(pdp.powers) / 2.0)
    g = rng.standard_normal(shape + (n_taps, 2))
    diffuse = (g[..., 0] + 1j * g[..., 1]) * std
    los = pdp.los_fraction
    if los > 0.0:
        i0 = pdp.delays.index(min(pdp.delays))
        p0 = pdp.powers[i0]
        diffuse[..., i0] = diffuse[..., i0] * math.sqrt(1.0 - los) + math.sqrt(p0 * los)
    taps = np.zeros(shape + (pdp.max_delay + 1,), dtype=complex)
    taps[..., list(pdp.delays)] = diffuse
    return taps


def frequency_response(taps, fft_size: int = 32) -> np.ndarray:
    """Per-bin channel gain seen after CP removal and a unitary FFT."""
    return np.fft.fft(taps, n=fft_size, axis=-1)


def convolve_taps(block, taps) -> np.ndarray:
    """Apply a tapped delay line to CP-prefixed blocks.

    Samples pushed past the block end are dropped and nothing leaks in from
    a previous block; with delays inside the CP this only touches the prefix,
    so the useful part sees an exact circular convolution.
    """
    block = np.asarray(block, dtype=complex)
    taps = np.asarray(taps)
    n_taps = taps.shape[-1]
    n = block.shape[-1]
    padded = np.concatenate((np.zeros(block.shape[:-1] + (n_taps - 1,), dtype=complex), block), axis=-1)
    windows = sliding_window_view(padded, n, axis=-1)  # (..., n_taps, n)
    return np.einsum("...lt,...l->...t", windows, taps[..., ::-1])


def channel_apply(block, pdp: PowerDelayProfile, rng: np.random.Generator, numerology: OfdmNumerology = DEFAULT_NUMEROLOGY):
    """Pass blocks ``(..., n_sym, samples)`` through one channel draw per leading index.

    Returns ``(received, H)``; ``H`` has shape ``(..., fft_size)`` and is the
    exact per-tone response, shared by all symbols of a draw.
    """
    pdp.check_fits(numerology)
    block = np.asarray(block)
    taps = draw_taps(pdp, block.shape[:-2], rng)
    received = convolve_taps(block, taps[..., None, :])
    return received, frequency_response(taps, numerology.fft_size)


def awgn(shape, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian noise with ``E|n|^2 = variance``."""
    g = rng.standard_normal(tuple(shape) + (2,))
    return g.view(np.complex128)[..., 0] * math.sqrt(variance / 2.0)

"""Perfect-CSI one-tap equalization and hard BPSK decisions."""

from __future__ import annotations

import numpy as np

# |H|^2 below this on any data tone is treated as a spectral null
NULL_TONE_EPS = 1e-24


def null_tones(h, eps: float = NULL_TONE_EPS) -> np.ndarray:
    return np.abs(np.asarray(h)) ** 2 < eps


def equalize_and_decide(received_tones, h) -> np.ndarray:
    """Zero-forcing division by the known response, then a hard decision on the real part.

    Returns bits (1 where the equalized symbol is negative). Tones with a
    null response come out as NaN after division and decide to 0; callers
    use :func:`null_tones` to discard such trials.
    """
    h = np.asarray(h)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.asarray(received_tones) / h
    return z.real < 0


def repetition_combine(copy_a, copy_b, h_a, h_b) -> np.ndarray:
    """Maximal-ratio combining of two received copies of the same symbol.

    Each equalized copy ``y / h`` is weighted by ``|h|^2``, which is the
    matched filter ``conj(h) * y``; with a shared draw this is a plain sum.
    """
    z = np.conj(h_a) * copy_a + np.conj(h_b) * copy_b
    return np.asarray(z).real < 0

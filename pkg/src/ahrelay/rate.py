"""Budget-limited data rate of a single link.

Chain: packet error target -> bit error target -> required Eb/N0 for
coherent BPSK -> rate that the received power can sustain at that Eb/N0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoCoverageError
from .fading import FadingModel
from .propagation import DeploymentModel, DeviceProfile, path_loss
from .special import q_function, q_inverse

BOLTZMANN = 1.380649e-23  # J/K
T0 = 290.0  # K


@dataclass(frozen=True)
class RateQuery:
    packet_length: int  # bits
    target_per: float
    coding_gain: float = 0.0  # dB reduction of the required Eb/N0
    temperature: float = T0

    def __post_init__(self):
        if self.packet_length < 1:
            raise DomainError(f"packet length must be >= 1 bit, got {self.packet_length}")
        if not 0.0 < self.target_per < 1.0:
            raise DomainError(f"target PER must lie in (0, 1), got {self.target_per}")
        if self.coding_gain < 0:
            raise DomainError(f"coding gain must be >= 0 dB, got {self.coding_gain}")
        if self.temperature <= 0:
            raise DomainError(f"temperature must be positive, got {self.temperature}")

    @classmethod
    def from_bytes(cls, packet_bytes: int, target_per: float, coding_gain: float = 0.0) -> "RateQuery":
        return cls(8 * int(packet_bytes), target_per, coding_gain)

    @property
    def target_ber(self) -> float:
        return ber_from_per(self.target_per, self.packet_length)

    @property
    def required_ebn0_db(self) -> float:
        """Eb/N0 needed after subtracting the coding gain."""
        return ebn0_for_ber_bpsk(self.target_ber) - self.coding_gain

    def with_per(self, per: float) -> "RateQuery":
        return RateQuery(self.packet_length, per, self.coding_gain, self.temperature)


@dataclass(frozen=True)
class NoiseModel:
    noise_figure: float  # dB
    temperature: float = T0

    @property
    def spectral_density(self) -> float:
        """Noise density in dBm/Hz: ``10 log10(k T0 * 1000) + F``."""
        return 10.0 * math.log10(BOLTZMANN * self.temperature * 1000.0) + self.noise_figure

    def power_dbm(self, bandwidth_hz: float) -> float:
        return self.spectral_density + 10.0 * math.log10(bandwidth_hz)


def ber_from_per(per: float, packet_length: int) -> float:
    """Bit error rate giving packet error rate ``per`` over ``packet_length`` independent bits."""
    if not 0.0 < per < 1.0:
        raise DomainError(f"PER must lie in (0, 1), got {per}")
    if packet_length < 1:
        raise DomainError(f"packet length must be >= 1, got {packet_length}")
    return -math.expm1(math.log1p(-per) / packet_length)


def per_from_ber(ber: float, packet_length: int) -> float:
    return -math.expm1(packet_length * math.log1p(-ber))


def ber_bpsk(ebn0_db):
    return q_function(np.sqrt(2.0 * 10.0 ** (np.asarray(ebn0_db, dtype=float) / 10.0)))


def ebn0_for_ber_bpsk(ber: float) -> float:
    """Eb/N0 (dB) at which coherent BPSK in AWGN reaches ``ber``."""
    if not 0.0 < ber < 0.5:
        raise DomainError(f"BPSK BER target must lie in (0, 0.5), got {ber}")
    x = q_inverse(ber)
    return 10.0 * math.log10(0.5 * x * x)


def _rate_db_at_1m(tx, rx, model, fading, p_out, q) -> float:
    fm = fading.fade_margin(p_out) if fading.kind != "none" else 0.0
    n0 = NoiseModel(rx.noise_figure, q.temperature).spectral_density
    return tx.tx_power + tx.antenna_gain + rx.antenna_gain - fm - q.required_ebn0_db - n0 - model.intercept


def max_rate_db(
    tx: DeviceProfile,
    rx: DeviceProfile,
    model: DeploymentModel,
    fading: FadingModel,
    p_out: float,
    d,
    q: RateQuery,
):
    """Sustainable rate in dB-Hz (dB relative to 1 b/s) at distance ``d``."""
    pl = path_loss(model, d)
    return _rate_db_at_1m(tx, rx, model, fading, p_out, q) + model.intercept - pl


def max_rate_at_distance(tx, rx, model, fading, p_out, d, q):
    """Sustainable rate in b/s at distance ``d`` (scalar or array)."""
    return 10.0 ** (max_rate_db(tx, rx, model, fading, p_out, d, q) / 10.0)


def max_distance_at_rate(tx, rx, model, fading, p_out, q, target_rate: float) -> float:
    """Largest distance (m) at which ``target_rate`` b/s is still sustainable."""
    if target_rate <= 0:
        raise DomainError(f"target rate must be positive, got {target_rate}")
    excess = _rate_db_at_1m(tx, rx, model, fading, p_out, q) - 10.0 * math.log10(target_rate)
    if excess < 0:
        raise NoCoverageError(
            f"no coverage at rate {target_rate:g} b/s: {-excess:.2f} dB short even at 1 m",
            deficit_db=-excess,
        )
    return 10.0 ** (excess / model.slope)

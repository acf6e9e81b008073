"""Baseband OFDM dual-hop DF simulator."""

from .channel import FLAT, TYPICAL_URBAN, PowerDelayProfile, channel_apply, exponential_pdp
from .ofdm import ofdm_demodulate, ofdm_modulate
from .receiver import equalize_and_decide, repetition_combine
from .simulate import BerEstimate, SimConfig, simulate_link, simulate_relay, write_csv

__all__ = [
    "FLAT",
    "TYPICAL_URBAN",
    "PowerDelayProfile",
    "channel_apply",
    "exponential_pdp",
    "ofdm_modulate",
    "ofdm_demodulate",
    "equalize_and_decide",
    "repetition_combine",
    "BerEstimate",
    "SimConfig",
    "simulate_link",
    "simulate_relay",
    "write_csv",
]

"""Link-budget, fade-margin, rate and decode-and-forward relay planning for sub-GHz WLAN.

The analytic engine lives in :mod:`ahrelay.propagation`, :mod:`ahrelay.fading`,
:mod:`ahrelay.rate` and :mod:`ahrelay.relay`; the Monte-Carlo OFDM simulator
in :mod:`ahrelay.phy`.
"""

from .catalog import default_catalog, load_catalog, mcs_lookup, regulatory_lookup
from .errors import AhRelayError, ConfigError, ConvergenceError, DomainError, NoCoverageError, NotDefinedError
from .fading import NO_FADING, RAYLEIGH, FadingModel, outage_from_margin, rayleigh_fade_margin, rician, rician_fade_margin
from .propagation import AP_EU, AP_US, MACRO, PICO, RS, ST, DeviceProfile, max_range, path_loss, received_power
from .rate import RateQuery, ber_from_per, ebn0_for_ber_bpsk, max_distance_at_rate, max_rate_at_distance
from .relay import RelayScenario, df_per, df_rate, relay_max_distance_at_rate, relay_max_range, relay_rate_sweep, split_outage

__version__ = "0.1.0"

__all__ = [
    "AP_EU", "AP_US", "MACRO", "NO_FADING", "PICO", "RAYLEIGH", "RS", "ST",
    "AhRelayError", "ConfigError", "ConvergenceError", "DeviceProfile", "DomainError",
    "FadingModel", "NoCoverageError", "NotDefinedError", "RateQuery", "RelayScenario",
    "ber_from_per", "default_catalog", "df_per", "df_rate", "ebn0_for_ber_bpsk",
    "load_catalog", "max_distance_at_rate", "max_range", "max_rate_at_distance",
    "mcs_lookup", "outage_from_margin", "path_loss", "rayleigh_fade_margin",
    "received_power", "regulatory_lookup", "relay_max_distance_at_rate",
    "relay_max_range", "relay_rate_sweep", "rician", "rician_fade_margin", "split_outage",
]

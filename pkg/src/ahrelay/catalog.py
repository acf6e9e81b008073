"""Static 802.11ah PHY data: MCS table, sensitivities, regulatory domains, OFDM numerology.

The data lives in an INI file (``data/catalog.ini``) so regulatory updates
need no code change. ``AHRELAY_CATALOG`` overrides the path.
"""

from __future__ import annotations

import configparser
import functools
import io
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .errors import ConfigError, NotDefinedError, UnknownEntryError

CATALOG_ENV = "AHRELAY_CATALOG"
DEFAULT_CATALOG_PATH = Path(__file__).with_name("data") / "catalog.ini"

MODULATIONS = ("BPSK", "QPSK", "16QAM", "64QAM", "256QAM")
BITS_PER_SYMBOL = {"BPSK": 1, "QPSK": 2, "16QAM": 4, "64QAM": 6, "256QAM": 8}
BAND_LIMITS_MHZ = (614.0, 960.0)

PathLike = Union[str, "os.PathLike[str]"]


@dataclass(frozen=True)
class McsProfile:
    id: int
    modulation: str
    code_rate: Fraction
    repetition: int
    rates: Mapping[float, float]
    mds: Mapping[float, float]

    def rate_mbps(self, bandwidth: float) -> float:
        try:
            return self.rates[float(bandwidth)]
        except KeyError:
            raise NotDefinedError(
                f"rate not defined for MCS{self.id} at {bandwidth:g} MHz"
            ) from None

    def mds_dbm(self, bandwidth: float) -> float:
        try:
            return self.mds[float(bandwidth)]
        except KeyError:
            raise NotDefinedError(
                f"MDS not defined for MCS{self.id} at {bandwidth:g} MHz"
            ) from None


@dataclass(frozen=True)
class McsView:
    """One (MCS, bandwidth) cell of the table.

    ``mds`` raises :class:`NotDefinedError` when the sensitivity for the
    pair was never published; it is not interpolated.
    """

    profile: McsProfile
    bandwidth: float
    rate_mbps: float

    @property
    def mds(self) -> float:
        return self.profile.mds_dbm(self.bandwidth)

    @property
    def rate_bps(self) -> float:
        return self.rate_mbps * 1e6


@dataclass(frozen=True)
class RegulatoryDomain:
    region: str
    bands: Tuple[Tuple[float, float], ...]
    erp_limits: Tuple[float, ...]
    bandwidths: Tuple[float, ...]

    @property
    def max_erp_dbm(self) -> float:
        from math import log10

        return 10.0 * log10(max(self.erp_limits))


@dataclass(frozen=True)
class OfdmNumerology:
    tone_spacing_khz: float = 31.25
    fft_size: int = 32
    data_tones: int = 24
    pilot_tones: int = 2
    gi_duration_us: float = 8.0
    symbol_duration_us: float = 40.0

    @property
    def bandwidth_mhz(self) -> float:
        return self.fft_size * self.tone_spacing_khz / 1000.0

    @property
    def cp_samples(self) -> int:
        # one sample per microsecond at 1 MHz sampling
        return int(round(self.gi_duration_us * self.bandwidth_mhz))

    @property
    def occupied_tones(self) -> int:
        return self.data_tones + self.pilot_tones

    def validate(self) -> None:
        useful_us = self.fft_size / self.bandwidth_mhz
        if abs(useful_us + self.gi_duration_us - self.symbol_duration_us) > 1e-9:
            raise ConfigError(
                f"symbol duration {self.symbol_duration_us} us != "
                f"{useful_us} us + GI {self.gi_duration_us} us"
            )
        if self.occupied_tones >= self.fft_size:
            raise ConfigError("occupied tones must leave room for DC and guards")


@dataclass(frozen=True)
class Catalog:
    version: int
    mcs: Mapping[int, McsProfile]
    regions: Mapping[str, RegulatoryDomain]
    ofdm: OfdmNumerology = field(default_factory=OfdmNumerology)
    source: Optional[str] = None

    def mcs_lookup(self, mcs_id: int, bandwidth: float) -> McsView:
        """Rate and sensitivity for one MCS at one bandwidth (MHz)."""
        try:
            profile = self.mcs[int(mcs_id)]
        except (KeyError, ValueError):
            known = ", ".join(str(k) for k in sorted(self.mcs))
            raise UnknownEntryError(f"unknown MCS id {mcs_id!r}; known: {known}") from None
        return McsView(profile, float(bandwidth), profile.rate_mbps(bandwidth))

    def regulatory_lookup(self, region: str) -> RegulatoryDomain:
        for name, dom in self.regions.items():
            if name.lower() == region.strip().lower():
                return dom
        known = ", ".join(self.regions)
        raise UnknownEntryError(f"unknown region {region!r}; known regions: {known}")

    def dumps(self) -> str:
        return dumps(self)


def _floats(text: str) -> Tuple[float, ...]:
    return tuple(float(x) for x in text.split(";") if x.strip())


def _band(text: str) -> Tuple[float, float]:
    lo, hi = text.split("-")
    return float(lo), float(hi)


def _parse(parser: configparser.ConfigParser, source: str) -> Catalog:
    mcs: Dict[int, McsProfile] = {}
    regions: Dict[str, RegulatoryDomain] = {}
    ofdm = OfdmNumerology()
    version = 0
    try:
        for section in parser.sections():
            sec = parser[section]
            if section == "catalog":
                version = sec.getint("version")
            elif section == "ofdm":
                ofdm = OfdmNumerology(
                    tone_spacing_khz=sec.getfloat("tone_spacing_khz"),
                    fft_size=sec.getint("fft_size"),
                    data_tones=sec.getint("data_tones"),
                    pilot_tones=sec.getint("pilot_tones"),
                    gi_duration_us=sec.getfloat("gi_duration_us"),
                    symbol_duration_us=sec.getfloat("symbol_duration_us"),
                )
                ofdm.validate()
            elif section.startswith("mcs."):
                idx = int(section[4:])
                rates = {float(k[5:]): float(v) for k, v in sec.items() if k.startswith("rate.")}
                mds = {float(k[4:]): float(v) for k, v in sec.items() if k.startswith("mds.")}
                modulation = sec["modulation"].strip()
                if modulation not in MODULATIONS:
                    raise ConfigError(f"[{section}] unknown modulation {modulation!r}", source)
                if any(v >= 0 for v in mds.values()):
                    raise ConfigError(f"[{section}] mds values must be negative dBm", source)
                mcs[idx] = McsProfile(
                    id=idx,
                    modulation=modulation,
                    code_rate=Fraction(sec["code_rate"].strip()),
                    repetition=sec.getint("repetition"),
                    rates=rates,
                    mds=mds,
                )
            elif section.startswith("region."):
                name = section[len("region."):]
                bands = tuple(_band(b) for b in sec["bands"].split(";") if b.strip())
                for lo, hi in bands:
                    if not (BAND_LIMITS_MHZ[0] <= lo < hi <= BAND_LIMITS_MHZ[1]):
                        raise ConfigError(f"[{section}] band {lo}-{hi} MHz outside sub-GHz range", source)
                erp = _floats(sec["erp_mw"])
                if not erp:
                    raise ConfigError(f"[{section}] erp_mw must not be empty", source)
                regions[name] = RegulatoryDomain(name, bands, erp, _floats(sec["bandwidths"]))
            else:
                raise ConfigError(f"unexpected section [{section}]", source)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"malformed catalog entry: {exc}", source) from exc
    return Catalog(version=version, mcs=mcs, regions=regions, ofdm=ofdm, source=source)


def loads(text: str, source: str = "<string>") -> Catalog:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep region / key case
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        raise ConfigError(str(exc).splitlines()[0], source, lineno) from exc
    return _parse(parser, source)


def load_catalog(path: Optional[PathLike] = None) -> Catalog:
    """Load a catalog file; falls back to ``$AHRELAY_CATALOG`` then the bundled data."""
    if path is None:
        path = os.environ.get(CATALOG_ENV) or DEFAULT_CATALOG_PATH
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read catalog: {exc.strerror}", str(path)) from exc
    return loads(text, source=str(path))


@functools.lru_cache(maxsize=None)
def _cached(path: str) -> Catalog:
    return load_catalog(path)


def default_catalog() -> Catalog:
    return _cached(os.environ.get(CATALOG_ENV) or str(DEFAULT_CATALOG_PATH))


def _num(x: float) -> str:
    # repr round-trips float64 exactly
    return repr(float(x))


def dumps(catalog: Catalog) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser["catalog"] = {"version": str(catalog.version)}
    o = catalog.ofdm
    parser["ofdm"] = {
        "tone_spacing_khz": _num(o.tone_spacing_khz),
        "fft_size": str(o.fft_size),
        "data_tones": str(o.data_tones),
        "pilot_tones": str(o.pilot_tones),
        "gi_duration_us": _num(o.gi_duration_us),
        "symbol_duration_us": _num(o.symbol_duration_us),
    }
    for idx in sorted(catalog.mcs):
        p = catalog.mcs[idx]
        sec = {
            "modulation": p.modulation,
            "code_rate": str(p.code_rate),
            "repetition": str(p.repetition),
        }
        sec.update({f"rate.{_num(bw)}": _num(r) for bw, r in sorted(p.rates.items())})
        sec.update({f"mds.{_num(bw)}": _num(m) for bw, m in sorted(p.mds.items())})
        parser[f"mcs.{idx}"] = sec
    for name, dom in catalog.regions.items():
        parser[f"region.{name}"] = {
            "bands": "; ".join(f"{_num(lo)}-{_num(hi)}" for lo, hi in dom.bands),
            "erp_mw": "; ".join(_num(e) for e in dom.erp_limits),
            "bandwidths": "; ".join(_num(b) for b in dom.bandwidths),
        }
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def mcs_lookup(mcs_id: int, bandwidth: float, catalog: Optional[Catalog] = None) -> McsView:
    return (catalog or default_catalog()).mcs_lookup(mcs_id, bandwidth)


def regulatory_lookup(region: str, catalog: Optional[Catalog] = None) -> RegulatoryDomain:
    return (catalog or default_catalog()).regulatory_lookup(region)


def mds_for(mcs_id: int, bandwidth: float = 1.0, catalog: Optional[Catalog] = None) -> float:
    """Shortcut for the published sensitivity of an (MCS, bandwidth) pair."""
    return mcs_lookup(mcs_id, bandwidth, catalog).mds


def known_regions(catalog: Optional[Catalog] = None) -> List[str]:
    return list((catalog or default_catalog()).regions)

"""Scenario files: INI sections describing a relay deployment, rate budget, grid and simulation.

Example::

    [scenario]
    direction = DL
    ap_rs_distance_m = 850
    p_out_total = 0.1
    mcs = 0

    [ap_rs]
    deployment = macro
    fading = rician
    k_factor_db = 9

    [rs_st]
    deployment = pico
    fading = rayleigh

    [rate]
    packet_bytes = 256
    per_total = 0.1

Every section except ``[scenario]`` is optional.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .errors import AhRelayError, ConfigError
from .fading import FadingModel
from .propagation import DeviceProfile, deployment, device_preset
from .rate import RateQuery
from .relay import DIRECTIONS, RelayScenario, Segment

KNOWN_SECTIONS = {"scenario", "ap_rs", "rs_st", "devices", "rate", "grid", "sim"}


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigError(f"grid step must be positive, got {self.step}")
        if not self.start < self.stop:
            raise ConfigError(f"grid start {self.start} must be below stop {self.stop}")

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """``start:stop:step``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be start:stop:step, got {text!r}")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError as exc:
            raise ConfigError(f"bad grid {text!r}: {exc}") from None

    def values(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        return self.start + self.step * np.arange(n + 1)


@dataclass(frozen=True)
class SimSettings:
    mcs: Optional[int] = None
    trials: int = 500_000
    seed: int = 2017
    min_errors: int = 100
    chunk_trials: int = 4096
    symbols_per_trial: int = 1
    repetition_fading: str = "shared"
    pdp_delays: Optional[Tuple[int, ...]] = None
    pdp_powers: Optional[Tuple[float, ...]] = None
    workers: int = 1


@dataclass(frozen=True)
class ScenarioFile:
    scenario: RelayScenario
    rate: Optional[RateQuery] = None
    target_bps: Optional[float] = None
    grid: Optional[Grid] = None
    sim: SimSettings = SimSettings()
    path: Optional[str] = None


def _locate(text: str, section: str, key: str) -> Tuple[Optional[int], Optional[int]]:
    in_section = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("["):
            in_section = stripped.strip("[]").strip() == section
            continue
        if in_section:
            m = re.match(r"\s*" + re.escape(key) + r"\s*[=:]\s*", line)
            if m:
                return lineno, m.end() + 1
    return None, None


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, text: str, path: str):
        self.parser = parser
        self.text = text
        self.path = path

    def error(self, section, key, message) -> ConfigError:
        line, col = _locate(self.text, section, key)
        return ConfigError(f"[{section}] {key}: {message}", self.path, line, col)

    def has(self, section, key) -> bool:
        return self.parser.has_option(section, key)

    def get(self, section, key, conv=str, default=None, required=False):
        if not self.parser.has_option(section, key):
            if required:
                raise ConfigError(f"[{section}] missing required key {key!r}", self.path)
            return default
        raw = self.parser.get(section, key).strip()
        try:
            return conv(raw)
        except AhRelayError as exc:
            raise self.error(section, key, str(exc)) from None
        except (TypeError, ValueError) as exc:
            raise self.error(section, key, f"invalid value {raw!r} ({exc})") from None


def _direction(text: str) -> str:
    d = text.upper()
    if d not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    return d


def _int_list(text: str) -> Tuple[int, ...]:
    return tuple(int(x) for x in re.split(r"[,;\s]+", text) if x)


def _float_list(text: str) -> Tuple[float, ...]:
    return tuple(float(x) for x in re.split(r"[,;\s]+", text) if x)


def _segment(r: _Reader, section: str, default: Segment) -> Segment:
    if not r.parser.has_section(section):
        return default
    dep = r.get(section, "deployment", deployment, default.deployment)
    kind = r.get(section, "fading", str, default.fading.kind)
    k_db = r.get(section, "k_factor_db", float, None)
    if kind.lower() == "rician" and k_db is None:
        k_db = default.fading.k_factor_db if default.fading.kind == "rician" else 9.0
    try:
        fading = FadingModel(kind, k_db)
    except AhRelayError as exc:
        raise r.error(section, "fading", str(exc)) from None
    return Segment(dep, fading)


def _device(r: _Reader, role: str, default: DeviceProfile) -> DeviceProfile:
    if not r.parser.has_section("devices"):
        return default
    dev = r.get("devices", role, device_preset, default)
    fields = {
        "tx_power": r.get("devices", f"{role}_tx_power_dbm", float),
        "antenna_gain": r.get("devices", f"{role}_antenna_gain_dbi", float),
        "noise_figure": r.get("devices", f"{role}_noise_figure_db", float),
    }
    return replace(dev, **{k: v for k, v in fields.items() if v is not None})


def parse_scenario(text: str, path: str = "<string>") -> ScenarioFile:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], path, getattr(exc, "lineno", None)) from None
    for section in parser.sections():
        if section not in KNOWN_SECTIONS:
            line = None
            for n, ln in enumerate(text.splitlines(), start=1):
                if ln.strip() == f"[{section}]":
                    line = n
                    break
            raise ConfigError(f"unknown section [{section}]; expected one of {sorted(KNOWN_SECTIONS)}", path, line, 1)
    if not parser.has_section("scenario"):
        raise ConfigError("missing [scenario] section", path)
    r = _Reader(parser, text, path)
    base = RelayScenario()
    try:
        scenario = RelayScenario(
            direction=r.get("scenario", "direction", _direction, "DL"),
            ap_rs=_segment(r, "ap_rs", base.ap_rs),
            rs_st=_segment(r, "rs_st", base.rs_st),
            ap_rs_distance=r.get("scenario", "ap_rs_distance_m", float, base.ap_rs_distance),
            p_out_total=r.get("scenario", "p_out_total", float, base.p_out_total),
            mcs=r.get("scenario", "mcs", int, base.mcs),
            ap=_device(r, "ap", base.ap),
            rs=_device(r, "rs", base.rs),
            st=_device(r, "st", base.st),
            outage_share=r.get("scenario", "outage_share", float, base.outage_share),
            per_share=r.get("scenario", "per_share", float, base.per_share),
        )
    except ConfigError:
        raise
    except AhRelayError as exc:
        raise ConfigError(f"[scenario] {exc}", path) from None

    rate = None
    target = None
    if parser.has_section("rate"):
        packet_bytes = r.get("rate", "packet_bytes", int, 256)
        try:
            rate = RateQuery.from_bytes(
                packet_bytes,
                r.get("rate", "per_total", float, 0.1),
                r.get("rate", "coding_gain_db", float, 0.0),
            )
        except AhRelayError as exc:
            raise ConfigError(f"[rate] {exc}", path) from None
        target = r.get("rate", "target_bps", float, None)

    grid = None
    if parser.has_section("grid"):
        try:
            grid = Grid(
                r.get("grid", "start", float, required=True),
                r.get("grid", "stop", float, required=True),
                r.get("grid", "step", float, required=True),
            )
        except ConfigError as exc:
            if exc.path is None:
                raise ConfigError(f"[grid] {exc}", path) from None
            raise

    sim = SimSettings()
    if parser.has_section("sim"):
        sim = SimSettings(
            mcs=r.get("sim", "mcs", int, None),
            trials=r.get("sim", "trials", int, sim.trials),
            seed=r.get("sim", "seed", int, sim.seed),
            min_errors=r.get("sim", "min_errors", int, sim.min_errors),
            chunk_trials=r.get("sim", "chunk_trials", int, sim.chunk_trials),
            symbols_per_trial=r.get("sim", "symbols_per_trial", int, sim.symbols_per_trial),
            repetition_fading=r.get("sim", "repetition_fading", str, sim.repetition_fading),
            pdp_delays=r.get("sim", "pdp_delays", _int_list, None),
            pdp_powers=r.get("sim", "pdp_powers", _float_list, None),
            workers=r.get("sim", "workers", int, sim.workers),
        )
        if (sim.pdp_delays is None) != (sim.pdp_powers is None):
            raise r.error("sim", "pdp_delays" if sim.pdp_delays is None else "pdp_powers",
                          "pdp_delays and pdp_powers must be given together")
    return ScenarioFile(scenario, rate, target, grid, sim, path)


def load_scenario(path) -> ScenarioFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc.strerror}", str(p)) from None
    return parse_scenario(text, str(p))

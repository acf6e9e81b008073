"""Outdoor 900 MHz path loss, the link budget, and its inversion to a range."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import DomainError, NoCoverageError, UnknownEntryError


@dataclass(frozen=True)
class DeploymentModel:
    """Log-distance path loss ``intercept + slope * log10(d)`` with d in meters.

    The 900 MHz carrier is baked into the coefficients.
    """

    kind: str
    intercept: float
    slope: float

    def __post_init__(self):
        if self.slope <= 0:
            raise DomainError(f"path-loss slope must be positive, got {self.slope}")


MACRO = DeploymentModel("macro", 8.0, 37.6)
PICO = DeploymentModel("pico", 23.3, 36.7)

_DEPLOYMENTS = {"macro": MACRO, "pico": PICO}


def deployment(name: str) -> DeploymentModel:
    try:
        return _DEPLOYMENTS[name.strip().lower()]
    except KeyError:
        raise UnknownEntryError(
            f"unknown deployment {name!r}; known: {', '.join(_DEPLOYMENTS)}"
        ) from None


@dataclass(frozen=True)
class DeviceProfile:
    role: str
    tx_power: float  # dBm
    antenna_gain: float  # dBi
    noise_figure: float  # dB

    def with_power(self, tx_power: float) -> "DeviceProfile":
        return replace(self, tx_power=float(tx_power))


AP_EU = DeviceProfile("AP", 10.0, 3.0, 3.0)
AP_US = DeviceProfile("AP", 30.0, 3.0, 3.0)
RS = DeviceProfile("RS", 10.0, 3.0, 3.0)
ST = DeviceProfile("ST", 0.0, 0.0, 5.0)


def device_preset(name: str, catalog=None) -> DeviceProfile:
    """Resolve ``ap-eu``, ``ap-us``, ``rs`` or ``st``.

    AP transmit powers come from the regional ERP ceiling in the catalog,
    so ``ap-eu`` follows the European entry if the data file changes.
    """
    from .catalog import default_catalog

    key = name.strip().lower()
    if key in ("ap-eu", "ap-us"):
        cat = catalog or default_catalog()
        region = "Europe" if key == "ap-eu" else "United States"
        return replace(AP_EU, tx_power=cat.regulatory_lookup(region).max_erp_dbm)
    if key == "rs":
        return RS
    if key == "st":
        return ST
    raise UnknownEntryError(f"unknown device preset {name!r}; known: ap-eu, ap-us, rs, st")


@dataclass(frozen=True)
class LinkBudgetResult:
    received_power: float  # dBm
    path_loss: float  # dB
    fade_margin_applied: float  # dB


def path_loss(model: DeploymentModel, d):
    """Path loss in dB at distance ``d`` (meters, scalar or array, d >= 1)."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(~(d_arr >= 1.0)):
        raise DomainError(f"path-loss models are undefined below 1 m (got {d})")
    pl = model.intercept + model.slope * np.log10(d_arr)
    return float(pl) if pl.ndim == 0 else pl


def _budget_at_1m(tx: DeviceProfile, rx: DeviceProfile, model: DeploymentModel, fm: float) -> float:
    return tx.tx_power + tx.antenna_gain + rx.antenna_gain - fm - model.intercept


def link_budget(tx: DeviceProfile, rx: DeviceProfile, model: DeploymentModel, d, fm: float = 0.0):
    if fm < 0:
        raise DomainError(f"fade margin must be >= 0 dB, got {fm}")
    pl = path_loss(model, d)
    prx = tx.tx_power + tx.antenna_gain - pl + rx.antenna_gain - fm
    return LinkBudgetResult(prx, pl, fm)


def received_power(tx: DeviceProfile, rx: DeviceProfile, model: DeploymentModel, d, fm: float = 0.0):
    """Received power in dBm after path loss and an optional fade margin."""
    return link_budget(tx, rx, model, d, fm).received_power


def max_range(tx: DeviceProfile, rx: DeviceProfile, model: DeploymentModel, mds: float, fm: float = 0.0) -> float:
    """Distance (m) at which the received power falls to ``mds``.

    Raises
    ------
    NoCoverageError
        If even at 1 m the budget does not reach ``mds``.
    """
    if fm < 0:
        raise DomainError(f"fade margin must be >= 0 dB, got {fm}")
    excess = _budget_at_1m(tx, rx, model, fm) - mds
    if excess < 0:
        raise NoCoverageError(
            f"no coverage: budget at 1 m is {-excess:.2f} dB below MDS {mds} dBm",
            deficit_db=-excess,
        )
    return 10.0 ** (excess / model.slope)


def pl_crossover(a: DeploymentModel, b: DeploymentModel) -> Optional[float]:
    """Distance where two models give equal loss, or None if parallel."""
    if math.isclose(a.slope, b.slope):
        return None
    return 10.0 ** ((b.intercept - a.intercept) / (a.slope - b.slope))

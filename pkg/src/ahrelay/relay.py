"""Dual-hop half-duplex decode-and-forward relay planning.

A scenario always routes AP <-> RS <-> ST; there is no direct AP-ST link.
The AP-RS segment sits at a fixed distance and the RS-ST segment is the one
swept or solved for. In downlink the AP-RS segment is hop 1, in uplink it is
hop 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DomainError, NoCoverageError
from .fading import RAYLEIGH, FadingModel, rician
from .propagation import (
    AP_EU,
    MACRO,
    RS,
    ST,
    DeploymentModel,
    DeviceProfile,
    max_range,
    received_power,
)
from .rate import RateQuery, max_distance_at_rate, max_rate_at_distance

DIRECTIONS = ("DL", "UL")


@dataclass(frozen=True)
class Segment:
    """Propagation settings of one physical segment (AP-RS or RS-ST)."""

    deployment: DeploymentModel = MACRO
    fading: FadingModel = RAYLEIGH


@dataclass(frozen=True)
class LinkSpec:
    """One hop in transmission order, with its allocated outage probability."""

    tx: DeviceProfile
    rx: DeviceProfile
    deployment: DeploymentModel
    fading: FadingModel
    p_out: float
    name: str = ""

    @property
    def fade_margin(self) -> float:
        if self.fading.kind == "none":
            return 0.0
        return self.fading.fade_margin(self.p_out)


@dataclass(frozen=True)
class RelayScenario:
    direction: str = "DL"
    ap_rs: Segment = field(default_factory=lambda: Segment(MACRO, rician(9.0)))
    rs_st: Segment = field(default_factory=lambda: Segment(MACRO, RAYLEIGH))
    ap_rs_distance: float = 400.0
    p_out_total: float = 0.1
    mcs: int = 10
    ap: DeviceProfile = AP_EU
    rs: DeviceProfile = RS
    st: DeviceProfile = ST
    outage_share: float = 0.5  # fraction of the outage budget given to hop 1
    per_share: float = 0.5  # fraction of the PER budget given to hop 1

    def __post_init__(self):
        direction = self.direction.strip().upper()
        object.__setattr__(self, "direction", direction)
        if direction not in DIRECTIONS:
            raise DomainError(f"direction must be DL or UL, got {self.direction!r}")
        if not self.ap_rs_distance >= 1.0:
            raise DomainError(f"AP-RS distance must be >= 1 m, got {self.ap_rs_distance}")
        if not 0.0 < self.p_out_total < 1.0:
            raise DomainError(f"end-to-end outage must lie in (0, 1), got {self.p_out_total}")
        for name in ("outage_share", "per_share"):
            share = getattr(self, name)
            if not 0.0 < share < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {share}")

    @property
    def hop_outages(self) -> Tuple[float, float]:
        return split_outage(self.p_out_total, self.outage_share)

    @property
    def swept_hop(self) -> int:
        """1-based transmission-order index of the RS-ST hop."""
        return 2 if self.direction == "DL" else 1

    @property
    def fixed_hop(self) -> int:
        return 3 - self.swept_hop

    def hops(self) -> Tuple[LinkSpec, LinkSpec]:
        p1, p2 = self.hop_outages
        if self.direction == "DL":
            h1 = LinkSpec(self.ap, self.rs, self.ap_rs.deployment, self.ap_rs.fading, p1, "AP-RS")
            h2 = LinkSpec(self.rs, self.st, self.rs_st.deployment, self.rs_st.fading, p2, "RS-ST")
        else:
            h1 = LinkSpec(self.st, self.rs, self.rs_st.deployment, self.rs_st.fading, p1, "ST-RS")
            h2 = LinkSpec(self.rs, self.ap, self.ap_rs.deployment, self.ap_rs.fading, p2, "RS-AP")
        return h1, h2

    @property
    def hop1(self) -> LinkSpec:
        return self.hops()[0]

    @property
    def hop2(self) -> LinkSpec:
        return self.hops()[1]

    @property
    def fixed_link(self) -> LinkSpec:
        return self.hops()[self.fixed_hop - 1]

    @property
    def swept_link(self) -> LinkSpec:
        return self.hops()[self.swept_hop - 1]

    def replace(self, **changes) -> "RelayScenario":
        return replace(self, **changes)


@dataclass(frozen=True)
class RelayRangeResult:
    ap_rs_distance: float
    rs_st_max: float
    total_max: float
    limiting_hop: int
    per_hop_fm: Tuple[float, float]
    fixed_hop_headroom_db: float


def split_outage(p_out_total: float, share: float = 0.5) -> Tuple[float, float]:
    """Per-hop outage allocation; a DF cascade is in outage if either hop is."""
    if not 0.0 < p_out_total < 1.0:
        raise DomainError(f"outage probability must lie in (0, 1), got {p_out_total}")
    if not 0.0 < share < 1.0:
        raise DomainError(f"share must lie in (0, 1), got {share}")
    return share * p_out_total, (1.0 - share) * p_out_total


def split_per(per_total: float, share: float = 0.5) -> Tuple[float, float]:
    """Per-hop PER targets whose sum is ``per_total`` (first-order DF composition)."""
    return split_outage(per_total, share)


def df_per(per1: float, per2: float) -> Tuple[float, float]:
    """End-to-end PER of a DF cascade: (exact, first-order approximation)."""
    for p in (per1, per2):
        if not 0.0 <= p < 1.0:
            raise DomainError(f"per-hop PER must lie in [0, 1), got {p}")
    return per1 + per2 - per1 * per2, per1 + per2


def df_rate(r1, r2):
    """Half-duplex DF throughput: two time slots, limited by the weaker hop."""
    if np.any(np.asarray(r1) < 0) or np.any(np.asarray(r2) < 0):
        raise DomainError("rates must be non-negative")
    out = 0.5 * np.minimum(r1, r2)
    return float(out) if np.ndim(out) == 0 else out


def relay_max_range(s: RelayScenario, mds: float) -> RelayRangeResult:
    """Maximum RS-ST distance keeping both hops above ``mds`` with their fade margins."""
    fixed = s.fixed_link
    swept = s.swept_link
    fm_fixed = fixed.fade_margin
    fm_swept = swept.fade_margin
    prx = received_power(fixed.tx, fixed.rx, fixed.deployment, s.ap_rs_distance, fm_fixed)
    headroom = prx - mds
    if headroom < 0:
        raise NoCoverageError(
            f"hop {s.fixed_hop} ({fixed.name}) infeasible at {s.ap_rs_distance:g} m: "
            f"{-headroom:.2f} dB below MDS {mds} dBm",
            hop=s.fixed_hop,
            deficit_db=-headroom,
        )
    try:
        d_max = max_range(swept.tx, swept.rx, swept.deployment, mds, fm_swept)
    except NoCoverageError as exc:
        raise NoCoverageError(
            f"hop {s.swept_hop} ({swept.name}) infeasible: {exc}", hop=s.swept_hop, deficit_db=exc.deficit_db
        ) from exc
    fms = (fm_fixed, fm_swept) if s.fixed_hop == 1 else (fm_swept, fm_fixed)
    return RelayRangeResult(s.ap_rs_distance, d_max, s.ap_rs_distance + d_max, s.swept_hop, fms, headroom)


def hop_rates(s: RelayScenario, q: RateQuery, distances) -> Tuple[np.ndarray, np.ndarray]:
    """Per-hop sustainable rates (b/s) with the RS-ST segment at each of ``distances``.

    ``q.target_per`` is the end-to-end PER; each hop gets its share of it
    and of the outage budget.
    """
    d = np.asarray(distances, dtype=float)
    per1, per2 = split_per(q.target_per, s.per_share)
    pers = (per1, per2)
    rates = []
    for idx, link in enumerate(s.hops(), start=1):
        hop_q = q.with_per(pers[idx - 1])
        dist = d if idx == s.swept_hop else np.full_like(d, s.ap_rs_distance)
        rates.append(max_rate_at_distance(link.tx, link.rx, link.deployment, link.fading, link.p_out, dist, hop_q))
    return rates[0], rates[1]


def relay_rate_sweep(s: RelayScenario, q: RateQuery, distances: Sequence[float]) -> List[Tuple[float, float]]:
    """End-to-end DF rate at each RS-ST distance, as ``(distance, rate)`` pairs."""
    r1, r2 = hop_rates(s, q, distances)
    r = df_rate(r1, r2)
    return [(float(d), float(x)) for d, x in zip(np.atleast_1d(distances), np.atleast_1d(r))]


def relay_max_distance_at_rate(s: RelayScenario, q: RateQuery, target_rate: float) -> float:
    """Largest RS-ST distance with end-to-end DF rate >= ``target_rate``."""
    if target_rate <= 0:
        raise DomainError(f"target rate must be positive, got {target_rate}")
    per_hops = split_per(q.target_per, s.per_share)
    hop_target = 2.0 * target_rate
    fixed = s.fixed_link
    fixed_q = q.with_per(per_hops[s.fixed_hop - 1])
    r_fixed = max_rate_at_distance(
        fixed.tx, fixed.rx, fixed.deployment, fixed.fading, fixed.p_out, s.ap_rs_distance, fixed_q
    )
    if r_fixed < hop_target:
        deficit = 10.0 * math.log10(hop_target / r_fixed)
        raise NoCoverageError(
            f"hop {s.fixed_hop} ({fixed.name}) sustains only {r_fixed:.4g} b/s at "
            f"{s.ap_rs_distance:g} m, {deficit:.2f} dB short of {hop_target:.4g} b/s",
            hop=s.fixed_hop,
            deficit_db=deficit,
        )
    swept = s.swept_link
    swept_q = q.with_per(per_hops[s.swept_hop - 1])
    try:
        return max_distance_at_rate(swept.tx, swept.rx, swept.deployment, swept.fading, swept.p_out, swept_q, hop_target)
    except NoCoverageError as exc:
        raise NoCoverageError(
            f"hop {s.swept_hop} ({swept.name}): {exc}", hop=s.swept_hop, deficit_db=exc.deficit_db
        ) from exc

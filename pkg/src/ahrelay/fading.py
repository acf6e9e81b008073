"""Fade margins for a target outage probability under Rayleigh and Rician fading.

All models use unit mean received power, E[R^2] = 1, so a margin is the dB
distance between the mean power and the power level exceeded with
probability ``1 - p_out``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConvergenceError, DomainError, UnknownEntryError
from .special import marcum_q1_complement

FADING_KINDS = ("none", "rayleigh", "rician")

RHO_MAX = 10.0
BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class FadingModel:
    kind: str = "rayleigh"
    k_factor_db: Optional[float] = None

    def __post_init__(self):
        kind = self.kind.strip().lower()
        object.__setattr__(self, "kind", kind)
        if kind not in FADING_KINDS:
            raise UnknownEntryError(f"unknown fading model {self.kind!r}; known: {', '.join(FADING_KINDS)}")
        if kind == "rician":
            if self.k_factor_db is None or math.isnan(self.k_factor_db):
                raise DomainError("Rician fading needs a K factor in dB")
        elif self.k_factor_db is not None:
            raise DomainError(f"K factor only applies to Rician fading, not {kind}")

    @property
    def k_linear(self) -> float:
        if self.kind != "rician":
            return 0.0
        return 10.0 ** (self.k_factor_db / 10.0)

    def fade_margin(self, p_out: float) -> float:
        if self.kind == "none":
            return 0.0
        if self.kind == "rayleigh":
            return rayleigh_fade_margin(p_out)
        return rician_fade_margin(self.k_factor_db, p_out)

    def outage(self, fm: float) -> float:
        return outage_from_margin(self, fm)


NO_FADING = FadingModel("none")
RAYLEIGH = FadingModel("rayleigh")


def rician(k_db: float = 9.0) -> FadingModel:
    return FadingModel("rician", float(k_db))


def _check_p(p_out: float) -> None:
    if not 0.0 < p_out < 1.0:
        raise DomainError(f"outage probability must lie in (0, 1), got {p_out}")


def rayleigh_fade_margin(p_out: float) -> float:
    """Rayleigh margin ``-10 log10(-ln(1 - p_out))`` in dB.

    Negative once ``p_out`` exceeds ``1 - 1/e``: the threshold then sits
    above the mean power.
    """
    _check_p(p_out)
    return -10.0 * math.log10(-math.log1p(-p_out))


def rician_power_cdf(rho: float, k_lin: float) -> float:
    """P(R^2 <= rho) for a unit-mean-power Rician envelope with linear K."""
    if rho <= 0.0:
        return 0.0
    if math.isinf(k_lin):
        return 1.0 if rho >= 1.0 else 0.0
    a = math.sqrt(2.0 * k_lin)
    b = math.sqrt(2.0 * (k_lin + 1.0) * rho)
    return marcum_q1_complement(a, b)


def rician_fade_margin(k_db: float, p_out: float, tol_db: float = 1e-6) -> float:
    """Rician margin in dB, by bisection of the power CDF on rho in (0, 10].

    ``k_db = -inf`` reduces to Rayleigh fading.

    Raises
    ------
    ConvergenceError
        If the root is not bracketed or the iteration cap is reached.
    """
    _check_p(p_out)
    if math.isnan(k_db) or k_db == math.inf:
        raise DomainError(f"K factor must be finite or -inf dB, got {k_db}")
    k_lin = 10.0 ** (k_db / 10.0)
    lo, hi = 0.0, RHO_MAX
    if rician_power_cdf(hi, k_lin) < p_out:
        raise ConvergenceError(f"outage {p_out} not bracketed on rho in (0, {RHO_MAX}]")
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if rician_power_cdf(mid, k_lin) < p_out:
            lo = mid
        else:
            hi = mid
        if lo > 0.0 and 10.0 * math.log10(hi / lo) < tol_db:
            return -10.0 * math.log10(0.5 * (lo + hi))
    raise ConvergenceError(
        f"Rician margin (K={k_db} dB, p_out={p_out}) did not converge in {BISECT_MAX_ITER} iterations"
    )


def outage_from_margin(model: FadingModel, fm: float) -> float:
    """Outage probability implied by a fade margin ``fm`` (dB)."""
    if model.kind == "none":
        raise DomainError("outage is undefined without a fading model")
    rho = 10.0 ** (-fm / 10.0)
    if model.kind == "rayleigh":
        return -math.expm1(-rho)
    return rician_power_cdf(rho, model.k_linear)

"""Gaussian tail function, its inverse, and the first-order Marcum Q function."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc, gammaln

from .errors import ConvergenceError, DomainError

SQRT2 = math.sqrt(2.0)


def q_function(x):
    """Standard normal upper tail, ``Q(x) = erfc(x / sqrt(2)) / 2``.

    scipy's ``erfc`` keeps full relative precision in the far tail, so the
    result is accurate to a few ulp for the BER range used here.
    """
    out = 0.5 * erfc(np.asarray(x, dtype=float) / SQRT2)
    return float(out) if np.ndim(out) == 0 else out


def q_inverse(p: float, xtol: float = 1e-13, max_iter: int = 400) -> float:
    """Inverse of :func:`q_function` for ``0 < p < 1`` by bisection.

    Bisection on a bracket that always contains the root, so it cannot
    diverge; ``xtol`` in x gives relative error in p below ``x * xtol``.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"Q^-1 requires 0 < p < 1, got {p}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -q_inverse(1.0 - p, xtol, max_iter)
    lo, hi = 0.0, 1.0
    while q_function(hi) > p:
        hi *= 2.0
        if hi > 64.0:
            raise DomainError(f"p={p} is below double-precision range of Q")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if q_function(mid) > p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= xtol * max(1.0, hi):
            return 0.5 * (lo + hi)
    raise ConvergenceError(f"Q^-1({p}) did not converge in {max_iter} iterations")


def _poisson_pmf(n: np.ndarray, mean: float) -> np.ndarray:
    if mean == 0.0:
        return (n == 0).astype(float)
    return np.exp(n * math.log(mean) - mean - gammaln(n + 1.0))


def _support(mean: float, tol: float) -> int:
    # Poisson tails beyond mean + 12 sd + 50 are far below 1e-10
    return int(mean + 12.0 * math.sqrt(mean) + 50.0)


def marcum_q1(a: float, b: float, tol: float = 1e-10) -> float:
    """First-order Marcum Q function ``Q1(a, b)``.

    Uses the identity ``Q1(a, b) = P[N_x <= N_l]`` for independent Poisson
    variables with means ``x = b**2/2`` and ``l = a**2/2``, i.e. the
    Poisson mixture of regularized incomplete gamma functions. All terms are
    non-negative, so there is no cancellation; truncation error is < ``tol``.
    """
    if a < 0 or b < 0 or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"Marcum Q needs finite a, b >= 0 (got a={a}, b={b})")
    if b == 0.0:
        return 1.0
    lam = 0.5 * a * a
    x = 0.5 * b * b
    n_max = max(_support(lam, tol), _support(x, tol))
    n = np.arange(n_max + 1, dtype=float)
    w = _poisson_pmf(n, lam)
    cdf_x = np.minimum(np.cumsum(_poisson_pmf(n, x)), 1.0)
    q = float(np.dot(w, cdf_x))
    return min(max(q, 0.0), 1.0)


def marcum_q1_complement(a: float, b: float, tol: float = 1e-10) -> float:
    """``1 - Q1(a, b)`` summed directly, accurate when Q1 is close to 1."""
    if a < 0 or b < 0 or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"Marcum Q needs finite a, b >= 0 (got a={a}, b={b})")
    if b == 0.0:
        return 0.0
    lam = 0.5 * a * a
    x = 0.5 * b * b
    n_max = max(_support(lam, tol), _support(x, tol))
    n = np.arange(n_max + 1, dtype=float)
    w = _poisson_pmf(n, lam)
    pmf_x = _poisson_pmf(n, x)
    # P[N_x > j], accumulated from the top to keep small tails exact
    tail = np.concatenate((np.cumsum(pmf_x[::-1])[::-1][1:], [0.0]))
    p = float(np.dot(w, tail))
    return min(max(p, 0.0), 1.0)

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import optimize, stats

from ahrelay.errors import DomainError, NoCoverageError
from ahrelay.fading import NO_FADING, RAYLEIGH
from ahrelay.propagation import AP_EU, AP_US, MACRO, PICO, ST
from ahrelay.rate import (
    NoiseModel,
    RateQuery,
    ber_bpsk,
    ber_from_per,
    ebn0_for_ber_bpsk,
    max_distance_at_rate,
    max_rate_at_distance,
    max_rate_db,
    per_from_ber,
)

Q_4K = RateQuery.from_bytes(4096, 0.1)


def ebn0_oracle(ber):
    """Root of Q(sqrt(2 g)) = ber in dB using scipy's normal tail."""
    f = lambda g_db: stats.norm.sf(math.sqrt(2 * 10 ** (g_db / 10))) - ber
    return optimize.brentq(f, -80, 30, xtol=1e-12)


@pytest.mark.parametrize("per,L,ber", [(0.1, 32768, 3.215e-6), (0.05, 2048, 2.504e-5)])
def test_ber_from_per(per, L, ber):
    assert ber_from_per(per, L) == pytest.approx(ber, rel=1e-3)


def test_ber_from_per_single_bit():
    assert ber_from_per(0.37, 1) == pytest.approx(0.37)


@pytest.mark.parametrize("args", [(0.0, 10), (1.0, 10), (0.1, 0)])
def test_ber_from_per_domain(args):
    with pytest.raises(DomainError):
        ber_from_per(*args)


@pytest.mark.parametrize("ber,ebn0", [(3.215e-6, 10.08), (2.504e-5, 9.15)])
def test_ebn0_examples(ber, ebn0):
    assert ebn0_for_ber_bpsk(ber) == pytest.approx(ebn0, abs=0.02)


def test_forward_bpsk_0db():
    assert float(ber_bpsk(0.0)) == pytest.approx(0.0786, abs=1e-4)


def test_ebn0_floor():
    with pytest.raises(DomainError):
        ebn0_for_ber_bpsk(0.5)


@settings(max_examples=100, deadline=None)
@given(ber=st.floats(min_value=1e-12, max_value=0.49))
def test_ebn0_matches_oracle(ber):
    assert ebn0_for_ber_bpsk(ber) == pytest.approx(ebn0_oracle(ber), abs=1e-6)


def test_noise_density():
    assert NoiseModel(0.0).spectral_density == pytest.approx(-174.0, abs=0.05)
    assert NoiseModel(5.0).spectral_density == pytest.approx(-169.0, abs=0.05)


def test_rate_dl_macro_589m():
    r = max_rate_at_distance(AP_EU, ST, MACRO, RAYLEIGH, 0.1, 589.0, Q_4K)
    assert r == pytest.approx(1e5, rel=0.05)


def test_rate_inversion_point_is_50_dbhz():
    d = 10 ** ((112.15 - 8) / 37.6)
    assert float(max_rate_db(AP_EU, ST, MACRO, RAYLEIGH, 0.1, d, Q_4K)) == pytest.approx(50.0, abs=0.05)


def test_rate_ul_pico_160m():
    from ahrelay.propagation import AP_EU as AP

    r = max_rate_at_distance(ST, AP, PICO, RAYLEIGH, 0.1, 160.0, Q_4K)
    assert r == pytest.approx(1e5, rel=0.1)


def test_distance_examples():
    assert max_distance_at_rate(AP_US, ST, MACRO, RAYLEIGH, 0.1, Q_4K, 1e5) == pytest.approx(2000, rel=0.05)
    assert max_distance_at_rate(AP_EU, ST, PICO, RAYLEIGH, 0.1, Q_4K, 1e5) == pytest.approx(264, rel=0.01)


def test_distance_grows_as_target_falls():
    ds = [max_distance_at_rate(AP_EU, ST, MACRO, RAYLEIGH, 0.1, Q_4K, r) for r in (1e6, 1e4, 1e2, 1.0, 1e-3)]
    assert all(a < b for a, b in zip(ds, ds[1:]))


def test_unreachable_rate():
    with pytest.raises(NoCoverageError):
        max_distance_at_rate(ST, ST, PICO, RAYLEIGH, 0.1, Q_4K, 1e20)


def test_coding_gain_scales_rate_exactly():
    coded = RateQuery(Q_4K.packet_length, Q_4K.target_per, 8.0)
    r0 = max_rate_at_distance(AP_EU, ST, MACRO, NO_FADING, 0.1, 300.0, Q_4K)
    r8 = max_rate_at_distance(AP_EU, ST, MACRO, NO_FADING, 0.1, 300.0, coded)
    assert r8 / r0 == pytest.approx(10 ** 0.8, rel=1e-12)


def test_rate_vectorised():
    d = np.array([100.0, 200.0, 400.0])
    r = max_rate_at_distance(AP_EU, ST, MACRO, RAYLEIGH, 0.1, d, Q_4K)
    assert r.shape == (3,)
    assert np.all(np.diff(r) < 0)


def test_query_validation():
    with pytest.raises(DomainError):
        RateQuery(0, 0.1)
    with pytest.raises(DomainError):
        RateQuery(8, 1.2)
    with pytest.raises(DomainError):
        RateQuery(8, 0.1, -1.0)


@settings(max_examples=100, deadline=None)
@given(L=st.integers(1, 100_000), per=st.floats(1e-4, 0.9))
def test_per_ber_round_trip(L, per):
    assert per_from_ber(ber_from_per(per, L), L) == pytest.approx(per, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(L=st.integers(2, 100_000), per=st.floats(1e-3, 0.5), d=st.floats(1.0, 5000.0))
def test_halving_length_never_hurts(L, per, d):
    long_q, short_q = RateQuery(L, per), RateQuery(L // 2, per)
    r_long = max_rate_at_distance(AP_EU, ST, MACRO, RAYLEIGH, 0.1, d, long_q)
    r_short = max_rate_at_distance(AP_EU, ST, MACRO, RAYLEIGH, 0.1, d, short_q)
    assert r_short >= r_long * (1 - 1e-12)


@settings(max_examples=100, deadline=None)
@given(d1=st.floats(1.0, 1e4), d2=st.floats(1.0, 1e4), p1=st.floats(0.01, 0.5), p2=st.floats(0.01, 0.5))
def test_rate_decreasing(d1, d2, p1, p2):
    assume(abs(d1 - d2) > 1e-6 and abs(p1 - p2) > 1e-6)
    (a, b), (lo_p, hi_p) = sorted((d1, d2)), sorted((p1, p2))
    assert max_rate_at_distance(AP_EU, ST, MACRO, RAYLEIGH, 0.1, b, Q_4K) < max_rate_at_distance(AP_EU, ST, MACRO, RAYLEIGH, 0.1, a, Q_4K)
    # larger tolerated outage means a smaller margin and a higher rate
    assert max_rate_at_distance(AP_EU, ST, MACRO, RAYLEIGH, hi_p, a, Q_4K) > max_rate_at_distance(AP_EU, ST, MACRO, RAYLEIGH, lo_p, a, Q_4K)


@settings(max_examples=100, deadline=None)
@given(target=st.floats(1.0, 1e8))
def test_rate_distance_round_trip(target):
    d = max_distance_at_rate(AP_EU, ST, PICO, RAYLEIGH, 0.1, Q_4K, target)
    assume(d >= 1.0)
    assert max_rate_at_distance(AP_EU, ST, PICO, RAYLEIGH, 0.1, d, Q_4K) == pytest.approx(target, rel=1e-6)

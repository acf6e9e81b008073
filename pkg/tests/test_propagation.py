
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ahrelay.errors import DomainError, NoCoverageError
from ahrelay.propagation import (
    AP_EU,
    AP_US,
    MACRO,
    PICO,
    RS,
    ST,
    DeploymentModel,
    device_preset,
    link_budget,
    max_range,
    path_loss,
    pl_crossover,
    received_power,
)


def test_path_loss_values():
    assert path_loss(MACRO, 1.0) == 8.0
    assert path_loss(MACRO, 1000.0) == pytest.approx(120.8)
    assert path_loss(PICO, 100.0) == pytest.approx(96.7)


def test_path_loss_vectorised():
    d = np.array([1.0, 10.0, 100.0])
    np.testing.assert_allclose(path_loss(MACRO, d), [8.0, 45.6, 83.2])


@pytest.mark.parametrize("d", [0.0, 0.5, -3.0, np.array([2.0, 0.9])])
def test_path_loss_domain(d):
    with pytest.raises(DomainError):
        path_loss(MACRO, d)


def test_deployment_slope_positive():
    with pytest.raises(DomainError):
        DeploymentModel("macro", 8.0, 0.0)


def test_presets():
    assert device_preset("ap-eu").tx_power == 10.0
    assert device_preset("ap-us").tx_power == pytest.approx(30.0)
    assert device_preset("st") == ST
    assert device_preset("rs") == RS
    assert (ST.tx_power, ST.antenna_gain, ST.noise_figure) == (0.0, 0.0, 5.0)
    assert (AP_EU.antenna_gain, AP_EU.noise_figure) == (3.0, 3.0)


def test_received_power_examples():
    assert received_power(AP_EU, ST, MACRO, 549.0) == pytest.approx(-98.0, abs=0.02)
    assert received_power(AP_EU, ST, MACRO, 1.0) == pytest.approx(10 + 3 + 0 - 8)
    assert received_power(AP_US, ST, MACRO, 1000.0, 9.77) == pytest.approx(-97.57)


def test_link_budget_identity():
    r = link_budget(AP_EU, ST, PICO, 123.4, 2.5)
    assert r.received_power == pytest.approx(AP_EU.tx_power + AP_EU.antenna_gain - r.path_loss + ST.antenna_gain - 2.5)
    assert r.fade_margin_applied == 2.5


def test_max_range_examples():
    assert max_range(AP_EU, ST, MACRO, -98.0) == pytest.approx(549, rel=0.01)
    assert max_range(ST, AP_EU, MACRO, -98.0) == pytest.approx(297, rel=0.01)
    assert max_range(AP_EU, ST, PICO, -98.0) == pytest.approx(245, rel=0.01)


def test_no_coverage():
    with pytest.raises(NoCoverageError) as exc:
        max_range(ST, ST, PICO, -10.0)
    # budget at 1 m: 0 dBm + 0 dBi + 0 dBi - 23.3 dB, against -10 dBm
    assert exc.value.deficit_db == pytest.approx(13.3)


def test_crossover_far_beyond_range():
    assert pl_crossover(MACRO, PICO) > 1e17
    d = np.logspace(0, 5, 200)
    assert np.all(path_loss(MACRO, d) < path_loss(PICO, d))


distances = st.floats(min_value=1.0, max_value=1e5, allow_nan=False)
margins = st.floats(min_value=0.0, max_value=30.0, allow_nan=False)
sens = st.floats(min_value=-120.0, max_value=-60.0, allow_nan=False)


@settings(max_examples=200)
@given(a=distances, b=distances)
def test_path_loss_monotone(a, b):
    if a < b:
        assert path_loss(MACRO, a) < path_loss(MACRO, b)
        assert path_loss(PICO, a) < path_loss(PICO, b)


@settings(max_examples=200)
@given(mds=sens, fm=margins)
def test_max_range_round_trip(mds, fm):
    try:
        d = max_range(AP_US, ST, MACRO, mds, fm)
    except NoCoverageError:
        return
    assert abs(received_power(AP_US, ST, MACRO, d, fm) - mds) < 1e-6


@settings(max_examples=100)
@given(mds=sens, fm1=margins, fm2=margins)
def test_max_range_decreasing_in_fm(mds, fm1, fm2):
    if fm1 < fm2 - 1e-9:
        try:
            far = max_range(AP_US, ST, MACRO, mds, fm1)
            near = max_range(AP_US, ST, MACRO, mds, fm2)
        except NoCoverageError:
            return
        assert near < far


@settings(max_examples=100)
@given(m1=sens, m2=sens)
def test_max_range_decreasing_in_mds(m1, m2):
    if m1 < m2 - 1e-9:
        assert max_range(AP_US, ST, PICO, m2) < max_range(AP_US, ST, PICO, m1)

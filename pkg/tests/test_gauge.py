import math

import pytest
from hypothesis import given, strategies as st

import oracles
from pauli_annulus import DomainError, GaugeData, compute_c0, flux_at_scale
from pauli_annulus.gauge import (gradient_gauge_circulation, real_momentum,
                                 symmetric_gauge_circulation, theta_circulation,
                                 theta_gradient_magnitude)


def test_symmetric_gauge_c0(geom0, unit_field, pot0):
    c0 = compute_c0(pot0, symmetric_gauge_circulation(geom0, unit_field))
    assert c0 == pytest.approx(oracles.FROZEN["c0_symmetric"], abs=1e-12)


def test_gradient_gauge_c0_zero(pot0):
    assert compute_c0(pot0, gradient_gauge_circulation(pot0)) == 0.0


def test_gamma_at_h01(pot0, geom0, unit_field):
    c0 = compute_c0(pot0, symmetric_gauge_circulation(geom0, unit_field))
    fl = flux_at_scale(GaugeData(0.0, c0, 0), 0.1)
    assert fl.floor_c0_h == -11
    assert fl.gamma_frac == pytest.approx(0.17978719333, abs=1e-10)


def test_circulation_shift_moves_c0(pot0):
    h, p = 0.1, 3
    base = compute_c0(pot0, 0.7)
    shifted = compute_c0(pot0, 0.7 + 2.0 * math.pi * h * p)
    assert abs((shifted - base) + h * p) <= 1e-12


def test_theta_gradient(geom0):
    assert theta_gradient_magnitude(geom0, 1.0) == pytest.approx(1.0 / math.log(2.0))
    assert theta_circulation(geom0) == pytest.approx(-2.0 * math.pi / math.log(2.0))
    with pytest.raises(DomainError):
        theta_gradient_magnitude(geom0, 3.0)


def test_bad_h():
    with pytest.raises(DomainError):
        flux_at_scale(GaugeData(0.0, 1.0, 0), 0.0)


@given(c0=st.floats(-5, 5), h=st.floats(0.01, 1.0), k=st.integers(-50, 50))
def test_frac_in_unit_interval(c0, h, k):
    fl = flux_at_scale(GaugeData(0.0, c0, 0), h)
    assert 0.0 <= fl.gamma_frac < 1.0
    assert real_momentum(3 + k, 1 + k, c0, h) == real_momentum(3, 1, c0, h)

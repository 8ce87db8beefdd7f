import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from pauli_annulus import AnnulusGeometry, DomainError, RadialField, solve_scalar_potential
from pauli_annulus.radial_field import poisson_residual


def test_closed_form_features(pot0):
    for name, got in [("r_min", pot0.r_min), ("phi_min", pot0.phi_min),
                      ("dn_inner", pot0.dn_phi_inner), ("dn_outer", pot0.dn_phi_outer)]:
        want = oracles.FROZEN[name]
        assert abs(got - want) <= 1e-10 * abs(want), name
    assert pot0.curvature == 1.0
    assert abs(pot0.phi_second_min - 1.0) < 1e-9


def test_boundary_values_exact(pot0):
    assert pot0.phi[0] == 0.0 and pot0.phi[-1] == 0.0
    assert pot0.phi.size == 4097


def test_phi_interpolation(pot0):
    assert abs(pot0.phi_at(1.25) - oracles.FROZEN["phi_1_25"]) < 1e-12
    rs = np.linspace(1.0, 2.0, 301)
    want = np.array([oracles.phi_exact(r) for r in rs])
    assert np.max(np.abs(pot0.phi_at(rs) - want)) < 1e-12
    dwant = np.array([oracles.dphi_exact(r) for r in rs])
    assert np.max(np.abs(pot0.dphi_at(rs) - dwant)) < 1e-10


def test_phi_at_outside_raises(pot0):
    with pytest.raises(DomainError):
        pot0.phi_at(2.5)


def test_poisson_residual_small(pot0, unit_field):
    assert poisson_residual(pot0, unit_field) < 1e-6


def test_linearity_in_field(geom0, pot0):
    doubled = solve_scalar_potential(geom0, RadialField.constant(2.0), 4096)
    assert np.max(np.abs(doubled.phi - 2.0 * pot0.phi)) <= 1e-14
    assert doubled.r_min == pytest.approx(pot0.r_min, rel=1e-12)


def test_polynomial_field_against_closed_form():
    # B = r: r phi' = r^3/3 + C, phi = r^3/9 + C ln r + D
    geom = AnnulusGeometry(0.5, 1.5)
    pot = solve_scalar_potential(geom, RadialField.polynomial([0.0, 1.0]), 4096)
    c = -(1.5**3 - 0.5**3) / 9.0 / math.log(3.0)
    d = -(0.5**3) / 9.0 - c * math.log(0.5)
    r_min = (-3.0 * c) ** (1.0 / 3.0)
    phi_min = r_min**3 / 9.0 + c * math.log(r_min) + d
    assert pot.r_min == pytest.approx(r_min, rel=1e-10)
    assert pot.phi_min == pytest.approx(phi_min, rel=1e-10)
    assert pot.curvature == pytest.approx(r_min, rel=1e-10)


def test_tabulated_matches_constant(geom0, pot0):
    r = np.linspace(0.9, 2.1, 13)
    pot = solve_scalar_potential(geom0, RadialField.tabulated(r, np.ones_like(r)), 4096)
    assert pot.phi_min == pytest.approx(pot0.phi_min, rel=1e-13)


def test_tabulated_nonpositive_cites_assumption():
    with pytest.raises(DomainError, match="Assumption 1"):
        RadialField.tabulated([1.0, 1.5, 2.0], [1.0, 0.0, 1.0])


def test_field_sign_change_rejected(geom0):
    with pytest.raises(DomainError, match="Assumption 1"):
        solve_scalar_potential(geom0, RadialField.polynomial([-1.5, 1.0]), 256)


@pytest.mark.parametrize("rho", [(1.0, 1.0), (2.0, 1.0), (0.0, 1.0), (-1.0, 1.0)])
def test_bad_geometry(rho):
    with pytest.raises(DomainError):
        AnnulusGeometry(*rho)


def test_disc_flux():
    assert RadialField.constant(2.0).disc_flux(1.0) == pytest.approx(2.0 * math.pi)
    assert RadialField.polynomial([0.0, 3.0]).disc_flux(1.0) == pytest.approx(2.0 * math.pi)
    with pytest.raises(DomainError):
        RadialField.tabulated([1.0, 2.0], [1.0, 1.0]).disc_flux(1.0)


def test_runtime(geom0, unit_field):
    t = time.perf_counter()
    solve_scalar_potential(geom0, unit_field, 4096)
    assert time.perf_counter() - t < 1.0


@settings(max_examples=25, deadline=None)
@given(rho1=st.floats(0.2, 3.0), ratio=st.floats(1.2, 4.0), b=st.floats(0.1, 10.0))
def test_invariants_random_constant(rho1, ratio, b):
    geom = AnnulusGeometry(rho1, rho1 * ratio)
    pot = solve_scalar_potential(geom, RadialField.constant(b), 512)
    assert np.all(pot.phi <= 0.0)
    assert geom.rho1 < pot.r_min < geom.rho2
    assert pot.phi_min < 0 and pot.dn_phi_inner > 0 and pot.dn_phi_outer > 0
    assert pot.phi_min <= pot.phi.min() + 1e-12 * abs(pot.phi_min)

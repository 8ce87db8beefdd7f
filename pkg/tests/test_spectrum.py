import dataclasses
import math

import numpy as np
import pytest

from pauli_annulus import (CoercivityError, DomainError, FiberProblem, SpectrumRequest,
                           ab_sweep, assemble, convergence_study, solve_fiber)
from pauli_annulus import spectrum as spectrum_mod
from pauli_annulus.asymptotics import alpha_k_bruteforce
from pauli_annulus.gauge import gradient_gauge_circulation, real_momentum

N = 1024


@pytest.fixture(scope="module")
def pot1k(geom0, unit_field):
    from pauli_annulus import solve_scalar_potential
    return solve_scalar_potential(geom0, unit_field, N)


@pytest.fixture(scope="module")
def req0(geom0, unit_field, pot1k):
    return SpectrumRequest(geom0, unit_field, gradient_gauge_circulation(pot1k),
                           [0.2, 0.1, 0.05], k_max=3, n_grid=N, threads=2)


@pytest.fixture(scope="module")
def spec0(req0, pot1k):
    return assemble(req0, pot1k)


def test_ground_state_fiber(spec0):
    s = spec0.scales[1]
    assert s.h == 0.1 and s.gamma_frac == 0.0
    assert (s.entries[0].m, s.entries[0].j) == (0, 1)


def test_sorted_union(spec0):
    for s in spec0.scales:
        flat = sorted((fs.eigenvalue(j).log_value(), m, j)
                      for m, fs in s.fibers.items() for j in (1, 2))
        assert [(e.value.log_value(), e.m, e.j) for e in s.entries] == flat


def test_gap_guard_holds(spec0):
    for s in spec0.scales:
        for e in s.entries:
            if e.j == 2:
                assert e.value.value() >= 2 * s.h * spec0.pot.B0 * 0.99


def test_window_sufficiency(spec0, pot1k, unit_field):
    for s in spec0.scales:
        lo, hi = s.window
        kth = s.entries[2].value.log_value()
        for m in list(range(lo - 4, lo)) + list(range(hi + 1, hi + 5)):
            fs = solve_fiber(FiberProblem(s.h, real_momentum(m, 0, s.c0, s.h), pot1k,
                                          unit_field, N))
            assert fs.eigenvalue(1).log_value() > kth


def test_coercive_profile(spec0):
    s = spec0.scales[-1]
    pref = {m: fs.prefactor1 for m, fs in s.fibers.items()}
    m_star = min(pref, key=pref.get)
    for m, v in pref.items():
        if abs(m - m_star) >= 3:
            assert v >= 2.0 * pref[m_star]


def test_gauge_index_shift(req0, pot1k, spec0):
    other = assemble(dataclasses.replace(req0, p=3, h_list=[0.1]), pot1k)
    a = sorted(e.value.log_value() for e in spec0.scales[1].entries)
    b = sorted(e.value.log_value() for e in other.scales[0].entries)
    assert a == b
    assert other.scales[0].ratios == spec0.scales[1].ratios


def test_h_list_validation(geom0, unit_field):
    with pytest.raises(DomainError):
        SpectrumRequest(geom0, unit_field, 0.0, [0.1, 0.2])
    with pytest.raises(DomainError):
        SpectrumRequest(geom0, unit_field, 0.0, [0.1], k_max=0)


def test_coercivity_error(req0, pot1k, monkeypatch):
    monkeypatch.setattr(spectrum_mod, "MAX_HALF_WIDTH", 1)
    with pytest.raises(CoercivityError):
        assemble(dataclasses.replace(req0, m_window=1, h_list=[0.2]), pot1k)


def test_ab_sweep_constant_for_zero_flux(req0, pot1k):
    rows = ab_sweep(dataclasses.replace(req0, h_list=[0.2, 0.15, 0.1]), pot1k)
    assert len({r.predicted_prefactor for r in rows}) == 1


def test_ab_sweep_symmetric_gauge(geom0, unit_field, pot1k):
    circ = unit_field.disc_flux(geom0.rho1)
    hs = list(np.linspace(0.2, 0.05, 7))
    req = SpectrumRequest(geom0, unit_field, circ, hs, n_grid=N, threads=2)
    rows = ab_sweep(req, pot1k)
    law = spectrum_mod.PrefactorLaw.from_potential(pot1k)
    for r in rows:
        assert r.predicted_prefactor == alpha_k_bruteforce(law, r.gamma_frac, 1)
        assert r.numeric_prefactor > 0


def test_convergence_needs_three(req0, pot1k):
    with pytest.raises(DomainError):
        convergence_study(dataclasses.replace(req0, h_list=[0.2, 0.1]), pot1k)


def test_convergence_rows(req0, pot1k):
    rows = convergence_study(dataclasses.replace(req0, k_max=2), pot1k)
    assert [r.h for r in rows] == [0.2, 0.1, 0.05]
    assert all(math.isnan(d) for d in rows[0].deltas)
    for prev, row in zip(rows, rows[1:]):
        for k in range(2):
            assert row.monotone[k] == (abs(row.ratios[k] - 1) < abs(prev.ratios[k] - 1))


# finite-h ratios for the unit annulus at n = 4096, c0 = 0 (regression anchor)
RATIO_ANCHOR = {0.2: (1.535833691384204, 1.4045312140403519),
                0.1: (0.9966327000621059, 0.9305109423228838),
                0.05: (0.8941290042172898, 0.8597670755382477)}


def test_ratio_regression_anchor(geom0, unit_field, pot0):
    req = SpectrumRequest(geom0, unit_field, gradient_gauge_circulation(pot0), [0.2, 0.1, 0.05],
                          k_max=2, threads=4)
    for s in assemble(req, pot0).scales:
        assert s.ratios == pytest.approx(RATIO_ANCHOR[s.h], rel=1e-9)

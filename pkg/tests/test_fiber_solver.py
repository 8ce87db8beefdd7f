import math

import numpy as np
import pytest
import scipy.linalg

import oracles
from pauli_annulus import (DomainError, FiberProblem, LogScaled, NumericalGuardError,
                           assemble_direct, assemble_weighted, kernel_residual, solve_fiber,
                           variational_upper_bound)
from pauli_annulus.asymptotics import PrefactorLaw, f_eval
from pauli_annulus.fiber_solver import (best_upper_bound, fiber_eigenvalues, reduce_to_standard,
                                        upper_bound_law)


def test_log_scale(pot0, unit_field):
    prob = FiberProblem(0.1, 0.0, pot0, unit_field)
    assert prob.log_scale == pytest.approx(2 * oracles.PHI_MIN / 0.1 + 0.5 * math.log(0.1),
                                           abs=1e-12)


def test_log_scaled_roundtrip():
    x = LogScaled.from_value(3.5e-40, -90.0)
    assert x.value() == pytest.approx(3.5e-40, rel=1e-14)


def test_exponent_guard(pot0, unit_field):
    with pytest.raises(NumericalGuardError):
        FiberProblem(1e-4, 0.0, pot0, unit_field)


def test_bad_inputs(pot0, unit_field):
    with pytest.raises(DomainError):
        FiberProblem(-0.1, 0.0, pot0, unit_field)
    with pytest.raises(DomainError):
        FiberProblem(0.1, math.nan, pot0, unit_field)
    with pytest.raises(DomainError):
        FiberProblem(0.1, 0.0, pot0, unit_field, formulation="spectral")


def test_weighted_matches_dense_pencil(pot0_small, unit_field):
    prob = FiberProblem(0.2, 0.3, pot0_small, unit_field, 512)
    k, mass = assemble_weighted(prob)
    want = scipy.linalg.eigh(k.to_dense(), np.diag(mass), eigvals_only=True)[:2]
    got = [e.value() for e in fiber_eigenvalues(prob)]
    assert np.allclose(got, want, rtol=1e-7)
    std = reduce_to_standard(k, mass)
    assert np.allclose(np.linalg.eigvalsh(std.to_dense())[:2], want, rtol=1e-9)


def test_direct_matches_dense(pot0_small, unit_field):
    prob = FiberProblem(0.2, -1.0, pot0_small, unit_field, 512, "direct")
    mat = assemble_direct(prob)
    want = np.linalg.eigvalsh(mat.to_dense())[:2]
    got = [e.value() for e in fiber_eigenvalues(prob)]
    assert np.allclose(got, want, rtol=1e-8)


@pytest.mark.parametrize("h", [0.2, 0.1])
@pytest.mark.parametrize("mt", [-2.0, 0.5, 2.0])
def test_direct_vs_weighted(pot0, unit_field, h, mt):
    a = fiber_eigenvalues(FiberProblem(h, mt, pot0, unit_field, 4096, "direct"), k=1)[0]
    b = fiber_eigenvalues(FiberProblem(h, mt, pot0, unit_field, 4096), k=1)[0]
    assert a.mantissa == pytest.approx(b.mantissa, rel=1e-5)


def test_chebyshev_anchor(pot0, unit_field):
    # spectral collocation on the closed-form potential gives 1.891979 for (0.2, m=-1)
    mant = fiber_eigenvalues(FiberProblem(0.2, -1.0, pot0, unit_field))[0].mantissa
    assert mant == pytest.approx(1.891979, rel=2e-5)


def test_small_h_no_underflow(pot0, unit_field):
    fs = solve_fiber(FiberProblem(0.005, 0.0, pot0, unit_field))
    assert fs.lambda1 > 0.0 and math.isfinite(fs.mantissas[0])
    assert fs.lambda1 < 1e-20 and abs(fs.mantissas[0] / oracles.FROZEN["f0"] - 1) < 0.02


def test_kernel_residual_converges(unit_field, geom0):
    from pauli_annulus import solve_scalar_potential
    res = [kernel_residual(FiberProblem(0.2, 1.0, solve_scalar_potential(geom0, unit_field, n),
                                        unit_field, n)) for n in (512, 1024)]
    assert res[0] / res[1] > 3.5


def test_gap_second_eigenvalue(pot0, unit_field):
    for mt in (-2.0, 0.0, 2.0):
        fs = solve_fiber(FiberProblem(0.1, mt, pot0, unit_field))
        assert fs.lambda2 >= 2 * 0.1 * 0.99


def test_upper_bound_above_lambda1(pot0, unit_field):
    for mt in (-2.0, 0.0, 1.5):
        prob = FiberProblem(0.05, mt, pot0, unit_field)
        lam = fiber_eigenvalues(prob, k=1)[0]
        ub = variational_upper_bound(prob)
        assert ub.mantissa >= lam.mantissa
        eps, best = best_upper_bound(prob)
        assert best.mantissa >= lam.mantissa


def test_upper_bound_tracks_prefactor(pot0, unit_field):
    # default layer width: within 25% of f(m) at h = 0.05
    law = PrefactorLaw.from_potential(pot0)
    for m in range(-2, 3):
        ub = variational_upper_bound(FiberProblem(0.05, float(m), pot0, unit_field))
        assert abs(ub.mantissa / f_eval(law, m) - 1.0) <= 0.25


def test_upper_bound_law_tends_to_f(pot0):
    law = PrefactorLaw.from_potential(pot0)
    assert upper_bound_law(pot0, 0, 1e-6) == pytest.approx(f_eval(law, 0), rel=1e-2)


def test_eps_out_of_range(pot0, unit_field):
    with pytest.raises(DomainError):
        variational_upper_bound(FiberProblem(0.1, 0.0, pot0, unit_field), eps=0.6)


def test_spin_up_gap(pot0, unit_field):
    lam = fiber_eigenvalues(FiberProblem(0.1, 0.0, pot0, unit_field, 4096, "direct", spin=1),
                            k=1)[0].value()
    assert lam >= 2 * 0.1 * 0.99

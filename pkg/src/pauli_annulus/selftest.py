"""Fast invariant checks run by ``pauli-annulus selftest``."""

from __future__ import annotations

import math

import numpy as np

from .asymptotics import PrefactorLaw, alpha_k, f_eval
from .fiber_solver import FiberProblem, assemble_direct, assemble_weighted
from .gauge import GaugeData, flux_at_scale, real_momentum
from .radial_field import AnnulusGeometry, RadialField, solve_scalar_potential
from .tridiag import TridiagonalSym, smallest_eigenvalues


def run_checks(geom: AnnulusGeometry, field: RadialField, n_grid: int = 512):
    """Yield ``(name, passed, detail)`` for each invariant."""
    pot = solve_scalar_potential(geom, field, n_grid)
    yield ("phi_boundary_zero", pot.phi[0] == 0.0 and pot.phi[-1] == 0.0,
           f"phi(rho1)={float(pot.phi[0])!r} phi(rho2)={float(pot.phi[-1])!r}")
    yield ("phi_at_r_min", abs(pot.phi_at(pot.r_min) - pot.phi_min) == 0.0, "")

    if field.kind == "constant":
        doubled = solve_scalar_potential(geom, RadialField.constant(2.0 * field.params[0]), n_grid)
        err = float(np.max(np.abs(doubled.phi - 2.0 * pot.phi))) / abs(pot.phi_min)
        yield ("linearity_in_B", err <= 1e-12, f"rel err {err:.3e}")

    law = PrefactorLaw.from_potential(pot)
    xs = np.linspace(-5.0, 5.0, 41)
    conv = f_eval(law, xs - 1) + f_eval(law, xs + 1) - 2 * f_eval(law, xs)
    yield ("f_convex", bool(np.all(conv >= 0.0)), f"min second difference {conv.min():.3e}")

    g = GaugeData(0.0, -1.082021, 0)
    base = flux_at_scale(g, 0.1).gamma_frac
    shifted = flux_at_scale(GaugeData(0.0, g.c0 + 0.1, 0), 0.1).gamma_frac
    yield ("gamma_frac_periodic", abs(base - shifted) <= 1e-12, f"{base!r} vs {shifted!r}")
    yield ("gamma_frac_zero", flux_at_scale(GaugeData(0.0, 0.0, 0), 0.3).gamma_frac == 0.0, "")

    ordered = all(alpha_k(law, gam, 1).value <= alpha_k(law, gam, 2).value
                  for gam in (0.0, 0.25, 0.5, 0.75))
    yield ("alpha_ordered", ordered, "")

    h = 0.2
    a = FiberProblem(h, real_momentum(3, 1, 0.0123, h), pot, field, 256, "direct")
    b = FiberProblem(h, real_momentum(4, 2, 0.0123, h), pot, field, 256, "direct")
    da, db = assemble_direct(a), assemble_direct(b)
    same = np.array_equal(da.diag, db.diag) and np.array_equal(da.offdiag, db.offdiag)
    wa, wb = assemble_weighted(a.__class__(h, a.m_tilde, pot, field, 256)), \
        assemble_weighted(b.__class__(h, b.m_tilde, pot, field, 256))
    same = same and np.array_equal(wa[0].diag, wb[0].diag) and np.array_equal(wa[1], wb[1])
    yield ("gauge_shift_bitwise", bool(same), "")

    diag = TridiagonalSym(np.full(20, 3.5), np.zeros(19))
    vals = smallest_eigenvalues(diag, 5)
    yield ("diagonal_matrix", bool(np.allclose(vals, 3.5, rtol=1e-12, atol=0)), "")

    n = 200
    dr = 1.0 / n
    lap = TridiagonalSym(np.full(n - 1, 2.0 / dr**2), np.full(n - 2, -1.0 / dr**2))
    exact = (2.0 / dr**2) * (1.0 - np.cos(np.arange(1, 6) * math.pi * dr))
    err = float(np.max(np.abs(smallest_eigenvalues(lap, 5) - exact) / exact))
    yield ("fd_laplacian", err <= 1e-10, f"rel err {err:.3e}")

"""Fibred radial operators at real angular momentum and their low eigenvalues.

For a fixed real momentum ``mt`` the spin-down block is ``L = d d^x`` with

    d^x = -i h (d/dr - (mt + 1/2)/r + phi'/h),

acting on ``H^1_0(rho1, rho2)``. Two discretisations are provided:

* ``direct``: central differences of
  ``-h^2 (v'' + v/(4 r^2)) + (h mt / r - phi')^2 v - h B v``.
* ``weighted``: the Rayleigh quotient
  ``h^2 int w |(d/dr - k/r) v|^2 / int w |v|^2`` with ``k = mt + 1/2`` and
  ``w = exp(-2 (phi - phi_min)/h)``. The edge operator is
  ``r_e^k (v_{i+1} r_{i+1}^{-k} - v_i r_i^{-k}) / dr``, which annihilates
  the discrete monomial ``r^k`` exactly.

Eigenvalues are returned in log-scaled form ``lambda = mantissa * exp(log_scale)``
with ``log_scale = 2 phi_min / h + ln(h) / 2``; the mantissa of ``lambda_1``
is the normalised prefactor ``f_{1,h}(mt)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DomainError, NumericalGuardError, ResolutionError
from .radial_field import RadialField, ScalarPotential
from .tridiag import (TridiagonalSym, log_sum_exp, smallest_eigenvalues,
                      smallest_singular_values)

EXPONENT_GUARD = 700.0
# fewer nodes than this with scaled weight above 1e-2 means the well is unresolved
MIN_RESOLVED_NODES = 8


def log_scale_for(phi_min: float, h: float) -> float:
    return 2.0 * phi_min / h + 0.5 * math.log(h)


@dataclass(frozen=True, eq=False)
class FiberProblem:
    """One radial fibre ``(h, mt)``.

    ``quarter_term`` and ``free_field`` are test hooks: the first drops the
    ``-h^2/(4 r^2)`` term of the direct form, the second replaces ``phi`` and
    ``B`` by zero.
    """

    h: float
    m_tilde: float
    pot: ScalarPotential
    field: RadialField
    n_grid: int = 4096
    formulation: str = "weighted"
    spin: int = -1
    quarter_term: bool = True
    free_field: bool = False
    eig_tol: float = 1e-12
    _cache: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.h > 0.0 or not math.isfinite(self.h):
            raise DomainError(f"h must be positive, got {self.h}")
        if not math.isfinite(self.m_tilde):
            raise DomainError("m_tilde must be finite")
        if self.n_grid < 128:
            raise DomainError(f"n_grid must be >= 128, got {self.n_grid}")
        if self.formulation not in ("direct", "weighted"):
            raise DomainError(f"unknown formulation {self.formulation!r}")
        if self.spin not in (-1, 1):
            raise DomainError("spin must be -1 or +1")
        if self.spin == 1 and self.formulation != "direct":
            raise DomainError("the spin-up block is only assembled in direct form")
        if 2.0 * abs(self.pot.phi_min) / self.h > EXPONENT_GUARD:
            raise NumericalGuardError(
                f"2|phi_min|/h = {2 * abs(self.pot.phi_min) / self.h:.1f} exceeds "
                f"{EXPONENT_GUARD:.0f}; h={self.h} is too small for double precision")

    @property
    def spacing(self) -> float:
        return self.pot.geom.width / self.n_grid

    @property
    def log_scale(self) -> float:
        return log_scale_for(self.pot.phi_min, self.h)

    def nodes(self) -> np.ndarray:
        return self.pot.geom.grid(self.n_grid)

    def midpoints(self) -> np.ndarray:
        r = self.nodes()
        return 0.5 * (r[:-1] + r[1:])

    def _profile(self, where: str):
        key = ("profile", where)
        if key not in self._cache:
            r = self.nodes() if where == "nodes" else self.midpoints()
            if self.free_field:
                vals = (np.zeros_like(r), np.zeros_like(r), np.zeros_like(r))
            elif where == "nodes" and self.n_grid == self.pot.n_grid:
                vals = (self.pot.phi, self.pot.dphi, self.pot.field_values)
            else:
                vals = (self.pot.phi_at(r), self.pot.dphi_at(r), self.field(r))
            self._cache[key] = (r,) + tuple(vals)
        return self._cache[key]

    @property
    def phi_ref(self) -> float:
        return 0.0 if self.free_field else self.pot.phi_min


def assemble_direct(prob: FiberProblem) -> TridiagonalSym:
    """Central-difference matrix of the spin block on interior nodes."""
    h, dr = prob.h, prob.spacing
    r, _, dphi, b = prob._profile("nodes")
    ri, dphii, bi = r[1:-1], dphi[1:-1], b[1:-1]
    kin = h * h / (dr * dr)
    quarter = h * h / (4.0 * ri * ri) if prob.quarter_term else 0.0
    diag = 2.0 * kin - quarter + (h * prob.m_tilde / ri - dphii) ** 2 + prob.spin * h * bi
    off = np.full(ri.size - 1, -kin)
    return TridiagonalSym(diag, off)


@dataclass(frozen=True)
class _EdgeOperator:
    k: float
    plus: np.ndarray     # coefficient of v_{e+1} on edge e
    minus: np.ndarray    # coefficient of v_e on edge e
    log_w_edge: np.ndarray
    log_w_node: np.ndarray


def _edge_operator(prob: FiberProblem) -> _EdgeOperator:
    key = ("edges",)
    if key in prob._cache:
        return prob._cache[key]
    h, dr = prob.h, prob.spacing
    k = prob.m_tilde + 0.5
    r, phi, _, _ = prob._profile("nodes")
    rm, phim, _, _ = prob._profile("mid")
    plus = np.exp(k * np.log(rm / r[1:])) / dr
    minus = np.exp(k * np.log(rm / r[:-1])) / dr
    ref = prob.phi_ref
    op = _EdgeOperator(k, plus, minus, -2.0 * (phim - ref) / h, -2.0 * (phi - ref) / h)
    prob._cache[key] = op
    return op


def _check_resolution(log_w_node: np.ndarray, n_grid: int) -> None:
    resolved = int(np.count_nonzero(log_w_node[1:-1] > math.log(1e-2)))
    if resolved < MIN_RESOLVED_NODES:
        raise ResolutionError(
            f"only {resolved} grid nodes resolve the weight exp(-2(phi-phi_min)/h); "
            f"increase n_grid (currently {n_grid})")


def assemble_weighted(prob: FiberProblem) -> tuple[TridiagonalSym, np.ndarray]:
    """Stiffness matrix and lumped mass diagonal of the weighted quotient.

    Numerator ``h^2 sum_e dr w_e (D v)_e^2`` with weights at edge midpoints;
    denominator ``sum_j dr w_j v_j^2`` (trapezoid, interior nodes). Weights
    are scaled by ``exp(2 phi_min/h)`` so they lie in ``(0, 1]``.
    """
    op = _edge_operator(prob)
    _check_resolution(op.log_w_node, prob.n_grid)
    h, dr = prob.h, prob.spacing
    w_e = np.exp(op.log_w_edge)
    w_n = np.exp(op.log_w_node[1:-1])
    if not np.any(w_n > 0.0):
        raise ResolutionError("all mass weights underflowed; increase n_grid")
    c = h * h * dr * w_e
    # interior node j (1..N-1) touches edge j-1 through plus and edge j through minus
    diag = c[:-1] * op.plus[:-1] ** 2 + c[1:] * op.minus[1:] ** 2
    off = -c[1:-1] * op.plus[1:-1] * op.minus[1:-1]
    return TridiagonalSym(diag, off), w_n * dr


def reduce_to_standard(stiffness: TridiagonalSym, mass_diag: np.ndarray) -> TridiagonalSym:
    """``M^{-1/2} K M^{-1/2}`` for a diagonal mass ``M``."""
    s = 1.0 / np.sqrt(mass_diag)
    return TridiagonalSym(stiffness.diag * s * s, stiffness.offdiag * s[:-1] * s[1:])


def weighted_bidiagonal_path(prob: FiberProblem) -> np.ndarray:
    """Entries of ``B`` with ``B^T B = M^{-1/2} K M^{-1/2}``, in Golub-Kahan order.

    Row ``e`` of ``B`` is edge ``e``; its entries are
    ``h * coef * sqrt(w_e / w_j)``, formed from log-weights so that no
    intermediate under- or overflows.
    """
    op = _edge_operator(prob)
    _check_resolution(op.log_w_node, prob.n_grid)
    h = prob.h
    le, ln = op.log_w_edge, op.log_w_node
    upper = h * op.plus[:-1] * np.exp(0.5 * (le[:-1] - ln[1:-1]))   # B[e, e+1], e=0..N-2
    lower = h * op.minus[1:] * np.exp(0.5 * (le[1:] - ln[1:-1]))    # B[e, e],   e=1..N-1
    path = np.empty(upper.size + lower.size)
    path[0::2] = upper
    path[1::2] = lower
    return path


@dataclass(frozen=True)
class LogScaled:
    """Positive number ``mantissa * exp(log_scale)``."""

    log_scale: float
    mantissa: float

    def log_value(self) -> float:
        if self.mantissa <= 0.0:
            return -math.inf
        return math.fsum((self.log_scale, math.log(self.mantissa)))

    def value(self) -> float:
        if self.mantissa <= 0.0:
            return self.mantissa * math.exp(min(self.log_scale, 700.0))
        return math.exp(self.log_value())

    @classmethod
    def from_value(cls, value: float, log_scale: float) -> "LogScaled":
        if value > 0.0:
            return cls(log_scale, math.exp(math.log(value) - log_scale))
        return cls(log_scale, value * math.exp(-log_scale) if value else 0.0)


@dataclass(frozen=True)
class FiberSpectrum:
    h: float
    m_tilde: float
    log_scale: float
    mantissas: tuple
    kernel_residual: float
    upper_bound_mantissa: float
    formulation: str
    grid_used: int

    @property
    def prefactor1(self) -> float:
        return self.mantissas[0]

    @property
    def lambda1(self) -> float:
        return LogScaled(self.log_scale, self.mantissas[0]).value()

    @property
    def lambda2(self) -> float:
        return LogScaled(self.log_scale, self.mantissas[1]).value()

    @property
    def upper_bound(self) -> float:
        return LogScaled(self.log_scale, self.upper_bound_mantissa).value()

    def eigenvalue(self, j: int) -> LogScaled:
        return LogScaled(self.log_scale, self.mantissas[j - 1])

    @property
    def diagnostics(self) -> dict:
        return {"grid_used": self.grid_used, "formulation": self.formulation}


def fiber_eigenvalues(prob: FiberProblem, k: int = 2, rtol: float | None = None) -> list[LogScaled]:
    """The ``k`` smallest eigenvalues of the fibre in log-scaled form."""
    rtol = prob.eig_tol if rtol is None else rtol
    log_scale = prob.log_scale
    if prob.formulation == "direct":
        vals = smallest_eigenvalues(assemble_direct(prob), k, rtol=rtol)
        return [LogScaled.from_value(float(v), log_scale) for v in vals]
    path = weighted_bidiagonal_path(prob)
    # scale B so that sigma^2 comes out near the mantissa, keeping b^2 finite
    top = float(np.max(np.abs(path)))
    log_s = min(-0.5 * log_scale, math.log(1e140 / top))
    sig = smallest_singular_values(path * math.exp(log_s), prob.n_grid - 1, k, rtol=rtol)
    out = []
    for s in sig:
        if s > 0.0:
            out.append(LogScaled(log_scale, math.exp(2.0 * (math.log(s) - log_s) - log_scale)))
        else:
            out.append(LogScaled(log_scale, 0.0))
    return out


def kernel_residual(prob: FiberProblem) -> float:
    """Relative discrete norm of ``d^x`` applied to ``exp(-(phi-phi_min)/h) r^k``."""
    h, dr = prob.h, prob.spacing
    k = prob.m_tilde + 0.5
    r, phi, dphi, _ = prob._profile("nodes")
    log_u = -(phi - prob.phi_ref) / h + k * np.log(r / prob.pot.r_min)
    top = float(np.max(log_u))
    u = np.exp(log_u - top)
    du = (u[2:] - u[:-2]) / (2.0 * dr)
    res = h * (du - (k / r[1:-1]) * u[1:-1] + (dphi[1:-1] / h) * u[1:-1])
    norm_u = math.sqrt(float(np.sum(u[1:-1] ** 2)))
    if norm_u == 0.0:
        raise ResolutionError("kernel monomial underflowed on the grid")
    return math.sqrt(float(np.sum(res**2))) / norm_u


def _optimal_profile(tau: np.ndarray, a: float, eps: float, h: float) -> np.ndarray:
    """``(1 - exp(-2 a tau/h)) / (1 - exp(-2 a eps/h))`` computed stably."""
    return np.expm1(-2.0 * a * tau / h) / math.expm1(-2.0 * a * eps / h)


def trial_cutoff(prob: FiberProblem, eps: float) -> np.ndarray:
    r = prob.nodes()
    geom = prob.pot.geom
    chi = np.ones_like(r)
    inner = r - geom.rho1 <= eps
    outer = geom.rho2 - r <= eps
    chi[inner] = _optimal_profile(r[inner] - geom.rho1, prob.pot.dn_phi_inner, eps, prob.h)
    chi[outer] = _optimal_profile(geom.rho2 - r[outer], prob.pot.dn_phi_outer, eps, prob.h)
    chi[0] = chi[-1] = 0.0
    return chi


def variational_upper_bound(prob: FiberProblem, eps: float | None = None) -> LogScaled:
    """Discrete Rayleigh quotient of ``chi(r) r^(mt+1/2)`` in the weighted form.

    ``chi`` rises from zero at each boundary with the optimal profile for the
    exponential weight ``exp(2 a tau/h)``, ``a`` the normal derivative of
    ``phi`` there, over a layer of width ``eps`` (default ``h**0.7``).
    Being a Rayleigh quotient of the weighted matrix pencil it bounds the
    discrete weighted ``lambda_1`` from above.
    """
    geom = prob.pot.geom
    if eps is None:
        eps = min(prob.h ** 0.7, 0.45 * geom.width)
    if not 0.0 < eps < geom.width / 2.0:
        raise DomainError(f"eps={eps} must lie in (0, {geom.width / 2})")
    op = _edge_operator(prob)
    h, dr = prob.h, prob.spacing
    r = prob.nodes()
    chi = trial_cutoff(prob, eps)
    v = chi * np.exp(op.k * np.log(r / prob.pot.r_min))
    # the edge operator maps chi r^k to r_e^k (chi_{e+1} - chi_e)/dr exactly
    rm = prob.midpoints()
    t = np.exp(op.k * np.log(rm / prob.pot.r_min)) * np.diff(chi) / dr
    nz = t != 0.0
    log_num = log_sum_exp(2.0 * math.log(h) + math.log(dr) + op.log_w_edge[nz]
                          + 2.0 * np.log(np.abs(t[nz])))
    vi = v[1:-1]
    mask = vi != 0.0
    log_den = log_sum_exp(math.log(dr) + op.log_w_node[1:-1][mask]
                          + 2.0 * np.log(np.abs(vi[mask])))
    return LogScaled(prob.log_scale, math.exp(log_num - log_den - prob.log_scale))


def eps_scan(h: float, n: int = 9) -> np.ndarray:
    """Boundary-layer widths ``h**a`` for ``a`` from 0.55 to 0.95."""
    return h ** np.linspace(0.55, 0.95, n)


def best_upper_bound(prob: FiberProblem, eps_grid=None) -> tuple[float, LogScaled]:
    """Minimum of :func:`variational_upper_bound` over a grid of ``eps``."""
    grid = eps_scan(prob.h) if eps_grid is None else eps_grid
    width = prob.pot.geom.width / 2.0
    best = None
    for eps in grid:
        if not 0.0 < eps < width:
            continue
        ub = variational_upper_bound(prob, float(eps))
        if best is None or ub.mantissa < best[1].mantissa:
            best = (float(eps), ub)
    if best is None:
        raise DomainError("no admissible eps in the scan")
    return best


def upper_bound_law(pot: ScalarPotential, m: float, h: float,
                    alpha: float = 0.7, beta: float = 0.45) -> float:
    """Closed-form prefactor ``C_m(h)`` of the trial-function upper bound."""
    geom = pot.geom
    e = 2.0 * m + 1.0
    denom = pot.r_min - math.copysign(1.0, e) * h**beta
    inner = (geom.rho1 + (h**alpha if m >= 0 else 0.0)) / denom
    outer = (geom.rho2 - (h**alpha if m < 0 else 0.0)) / denom
    return 2.0 * math.sqrt(pot.phi_second_min / math.pi) * (
        pot.dn_phi_inner * inner**e + pot.dn_phi_outer * outer**e)


def solve_fiber(prob: FiberProblem, k: int = 2) -> FiberSpectrum:
    eig = fiber_eigenvalues(prob, k=k)
    wprob = prob if prob.formulation == "weighted" else FiberProblem(
        prob.h, prob.m_tilde, prob.pot, prob.field, prob.n_grid, "weighted",
        free_field=prob.free_field)
    ub = variational_upper_bound(wprob)
    return FiberSpectrum(
        h=prob.h, m_tilde=prob.m_tilde, log_scale=prob.log_scale,
        mantissas=tuple(e.mantissa for e in eig),
        kernel_residual=kernel_residual(prob),
        upper_bound_mantissa=ub.mantissa,
        formulation=prob.formulation, grid_used=prob.n_grid,
    )

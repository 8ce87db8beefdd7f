"""Annulus geometry, radial magnetic field and the Dirichlet scalar potential.

The scalar potential solves ``phi'' + phi'/r = B`` on ``(rho1, rho2)`` with
``phi(rho1) = phi(rho2) = 0``. It is built by quadrature:

    phi'(r) = (G(r) + C) / r,   G(r) = int_{rho1}^r s B(s) ds,

with ``C`` chosen so that ``phi'`` integrates to zero over the interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator
from scipy.optimize import brentq

from .errors import DomainError, InvariantError


@dataclass(frozen=True)
class AnnulusGeometry:
    rho1: float
    rho2: float

    def __post_init__(self):
        if not (math.isfinite(self.rho1) and math.isfinite(self.rho2)):
            raise DomainError("radii must be finite")
        if not 0.0 < self.rho1 < self.rho2:
            raise DomainError(
                f"need 0 < rho1 < rho2, got rho1={self.rho1}, rho2={self.rho2}")

    @property
    def width(self) -> float:
        return self.rho2 - self.rho1

    def contains(self, r) -> bool:
        r = np.asarray(r, dtype=float)
        return bool(np.all((r >= self.rho1) & (r <= self.rho2)))

    def grid(self, n: int) -> np.ndarray:
        """Uniform grid with ``n`` intervals; endpoints are exact."""
        r = np.linspace(self.rho1, self.rho2, n + 1)
        r[0], r[-1] = self.rho1, self.rho2
        return r


@dataclass(frozen=True)
class RadialField:
    """Radial magnetic field ``B(r) > 0``.

    Use the constructors :meth:`constant`, :meth:`polynomial` and
    :meth:`tabulated` rather than instantiating directly.
    """

    kind: str
    params: tuple
    _func: Callable = dc_field(repr=False, compare=False)

    @classmethod
    def constant(cls, value: float) -> "RadialField":
        value = float(value)
        if not value > 0.0:
            raise DomainError(f"constant field must be > 0, got {value}")
        return cls("constant", (value,), lambda r: np.full_like(r, value))

    @classmethod
    def polynomial(cls, coeffs) -> "RadialField":
        """``B(r) = sum_k coeffs[k] * r**k``."""
        coeffs = tuple(float(c) for c in coeffs)
        if not coeffs:
            raise DomainError("polynomial field needs at least one coefficient")
        poly = np.polynomial.Polynomial(coeffs)
        return cls("polynomial", coeffs, lambda r: poly(r))

    @classmethod
    def tabulated(cls, r, b) -> "RadialField":
        """Monotone cubic (PCHIP) interpolation of a ``(r, B)`` table."""
        r = np.asarray(r, dtype=float)
        b = np.asarray(b, dtype=float)
        if r.ndim != 1 or r.shape != b.shape or r.size < 2:
            raise DomainError("field table needs matching 1-D r and B columns of length >= 2")
        if np.any(np.diff(r) <= 0):
            raise DomainError("field table radii must be strictly increasing")
        if np.any(~(b > 0)):
            bad = int(np.flatnonzero(~(b > 0))[0])
            raise DomainError(
                f"field table entry {bad} has B={b[bad]}: the field must be "
                "strictly positive (Assumption 1)")
        interp = PchipInterpolator(r, b, extrapolate=False)
        return cls("tabulated", (tuple(r), tuple(b)), interp)

    def __call__(self, r):
        r_arr = np.asarray(r, dtype=float)
        out = np.asarray(self._func(np.atleast_1d(r_arr)), dtype=float)
        if np.any(np.isnan(out)):
            raise DomainError("field evaluated outside its tabulated range")
        return out.reshape(r_arr.shape) if r_arr.ndim else float(out[0])

    def check_positive(self, r: np.ndarray) -> None:
        b = self(r)
        if np.any(~(b > 0)):
            i = int(np.flatnonzero(~(b > 0))[0])
            raise DomainError(
                f"B({r[i]:.17g}) = {b[i]:.17g} is not strictly positive (Assumption 1)")

    def infimum(self, geom: AnnulusGeometry, n: int = 4096) -> float:
        """Minimum of ``B`` over the uniform grid with ``n`` intervals."""
        r = geom.grid(n)
        self.check_positive(r)
        return float(np.min(self(r)))

    def disc_flux(self, radius: float) -> float:
        """``2 pi int_0^radius s B(s) ds`` for fields with a natural extension.

        Tabulated fields are only known on the annulus, so the flux through
        the hole is undefined for them.
        """
        if self.kind == "constant":
            return math.pi * radius**2 * self.params[0]
        if self.kind == "polynomial":
            return 2.0 * math.pi * math.fsum(
                c * radius ** (k + 2) / (k + 2) for k, c in enumerate(self.params))
        raise DomainError(
            "symmetric_gauge needs a field with a declared extension into the "
            "hole (constant or polynomial kind); give the circulation instead")

    def describe(self) -> dict:
        if self.kind == "tabulated":
            return {"kind": "tabulated", "r": list(self.params[0]), "B": list(self.params[1])}
        if self.kind == "constant":
            return {"kind": "constant", "value": self.params[0]}
        return {"kind": "polynomial", "coeffs": list(self.params)}


@dataclass(frozen=True, eq=False)
class ScalarPotential:
    """Gridded scalar potential with its derived features.

    ``dn_phi_inner`` uses the exterior normal of the annulus, which points
    towards the origin on the inner circle, so it equals ``-phi'(rho1)``.
    """

    geom: AnnulusGeometry
    grid: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    field_values: np.ndarray
    phi_min: float
    r_min: float
    curvature: float
    phi_second_min: float
    dn_phi_inner: float
    dn_phi_outer: float
    B0: float
    _phi_spline: CubicHermiteSpline = dc_field(repr=False)
    _dphi_spline: CubicHermiteSpline = dc_field(repr=False)

    @property
    def n_grid(self) -> int:
        return self.grid.size - 1

    @property
    def spacing(self) -> float:
        return self.geom.width / self.n_grid

    def features(self) -> dict:
        return {
            "phi_min": self.phi_min,
            "r_min": self.r_min,
            "curvature": self.curvature,
            "phi_second_min": self.phi_second_min,
            "dn_inner": self.dn_phi_inner,
            "dn_outer": self.dn_phi_outer,
            "B0": self.B0,
        }

    def _check_range(self, r):
        r = np.asarray(r, dtype=float)
        if np.any((r < self.geom.rho1) | (r > self.geom.rho2)) or np.any(np.isnan(r)):
            raise DomainError(
                f"r must lie in [{self.geom.rho1}, {self.geom.rho2}]")
        return r

    def phi_at(self, r):
        """Cubic Hermite interpolant of ``phi``; exact at the nodes."""
        r = self._check_range(r)
        out = self._phi_spline(r)
        return float(out) if out.ndim == 0 else out

    def dphi_at(self, r):
        """Cubic Hermite interpolant of ``phi'`` (slopes from the ODE)."""
        r = self._check_range(r)
        out = self._dphi_spline(r)
        return float(out) if out.ndim == 0 else out


def phi_at(pot: ScalarPotential, r):
    return pot.phi_at(r)


def solve_scalar_potential(geom: AnnulusGeometry, field: RadialField,
                           n_grid: int = 4096) -> ScalarPotential:
    """Solve the radial Dirichlet Poisson problem by composite Simpson quadrature."""
    if n_grid < 64:
        raise DomainError(f"n_grid must be >= 64, got {n_grid}")
    r = geom.grid(n_grid)
    field.check_positive(r)
    b = field(r)

    g = cumulative_simpson(r * b, x=r, initial=0.0)
    # phi = Phi[g/r] + C * Phi[1/r]; the same cumulative rule on both parts
    # makes phi(rho2) vanish to rounding.
    part_g = cumulative_simpson(g / r, x=r, initial=0.0)
    part_1 = cumulative_simpson(1.0 / r, x=r, initial=0.0)
    c = -part_g[-1] / part_1[-1]
    dphi = (g + c) / r
    phi = part_g + c * part_1
    phi[0] = 0.0
    phi[-1] = 0.0

    d2phi = b - dphi / r
    phi_spline = CubicHermiteSpline(r, phi, dphi)
    dphi_spline = CubicHermiteSpline(r, dphi, d2phi)

    if np.any(phi > 0.0):
        raise InvariantError("potential is positive at an interior node")
    signs = np.sign(dphi)
    changes = np.flatnonzero(signs[:-1] * signs[1:] <= 0)
    # a node exactly at zero registers on both adjacent intervals
    if changes.size == 0 or changes.size > 2 or (changes.size == 2 and changes[1] != changes[0] + 1):
        raise InvariantError("phi' must change sign exactly once on (rho1, rho2)")
    i = int(changes[0])
    lo, hi = r[i], r[min(i + 1, n_grid)]
    if dphi[i] == 0.0:
        r_min = float(r[i])
    else:
        try:
            r_min = brentq(dphi_spline, lo, hi, xtol=1e-12 * geom.width, rtol=1e-15)
        except ValueError as exc:  # pragma: no cover - invariant already checked
            raise InvariantError(f"failed to bracket the root of phi': {exc}") from exc
    if not geom.rho1 < r_min < geom.rho2:
        raise InvariantError("r_min must lie strictly inside the annulus")

    phi_min = float(phi_spline(r_min))
    curvature = float(field(r_min))
    phi_second_min = float(dphi_spline.derivative()(r_min))
    dn_inner = float(-dphi[0])
    dn_outer = float(dphi[-1])
    b0 = float(np.min(b))
    if not phi_min < 0.0:
        raise InvariantError("phi_min must be strictly negative")
    if not (dn_inner > 0.0 and dn_outer > 0.0):
        raise InvariantError("normal derivatives must be positive (Hopf)")
    if curvature < b0:
        raise InvariantError("B(r_min) below the grid infimum")

    for arr in (r, phi, dphi, b):
        arr.setflags(write=False)
    return ScalarPotential(
        geom=geom, grid=r, phi=phi, dphi=dphi, field_values=b,
        phi_min=phi_min, r_min=float(r_min), curvature=curvature,
        phi_second_min=phi_second_min, dn_phi_inner=dn_inner,
        dn_phi_outer=dn_outer, B0=b0,
        _phi_spline=phi_spline, _dphi_spline=dphi_spline,
    )


def poisson_residual(pot: ScalarPotential, field: RadialField) -> float:
    """Max second-order FD residual of ``phi'' + phi'/r - B`` at interior nodes."""
    r, phi, dr = pot.grid, pot.phi, pot.spacing
    lap = (phi[2:] - 2.0 * phi[1:-1] + phi[:-2]) / dr**2
    grad = (phi[2:] - phi[:-2]) / (2.0 * dr)
    return float(np.max(np.abs(lap + grad / r[1:-1] - field(r[1:-1]))))

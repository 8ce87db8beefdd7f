"""Gauge data on the annulus: circulations, the flux constant and its fractional part.

The vector potential only enters the spectrum through its circulation around
the inner circle. Writing ``c0 = rho1 * phi'(rho1) - circ / (2 pi)``, the
potentials ``A_{h,p}`` carry the real angular shift ``gamma_{h,p} = p + c0/h``
and the fibre at integer momentum ``m`` sees ``m - gamma_{h,p}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .radial_field import AnnulusGeometry, RadialField, ScalarPotential


def theta_gradient_magnitude(geom: AnnulusGeometry, r: float) -> float:
    """``|grad-perp theta|(r) = 1 / (r |ln(rho1/rho2)|)``.

    ``theta`` is harmonic with ``theta = 1`` on the inner and ``0`` on the outer
    circle; its perpendicular gradient points along ``-e_s`` because
    ``ln(rho1/rho2) < 0`` (see :func:`theta_circulation`).
    """
    if not geom.rho1 <= r <= geom.rho2:
        raise DomainError(f"r={r} outside [{geom.rho1}, {geom.rho2}]")
    return 1.0 / (r * abs(math.log(geom.rho1 / geom.rho2)))


def theta_circulation(geom: AnnulusGeometry) -> float:
    """Signed circulation of ``grad-perp theta`` on the inner circle."""
    return 2.0 * math.pi / math.log(geom.rho1 / geom.rho2)


@dataclass(frozen=True)
class GaugeData:
    circ_int_A: float
    c0: float
    p: int = 0


@dataclass(frozen=True)
class FluxAtScale:
    h: float
    gamma_hp: float
    gamma_frac: float
    floor_c0_h: int


def compute_c0(pot: ScalarPotential, circ_int_A: float) -> float:
    dphi_inner = -pot.dn_phi_inner
    return pot.geom.rho1 * dphi_inner - circ_int_A / (2.0 * math.pi)


def gauge_data(pot: ScalarPotential, circ_int_A: float, p: int = 0) -> GaugeData:
    if not math.isfinite(circ_int_A):
        raise DomainError("circulation must be finite")
    return GaugeData(float(circ_int_A), compute_c0(pot, circ_int_A), int(p))


def symmetric_gauge_circulation(geom: AnnulusGeometry, field: RadialField) -> float:
    """Circulation of the symmetric gauge: the flux through the inner disc."""
    return field.disc_flux(geom.rho1)


def gradient_gauge_circulation(pot: ScalarPotential) -> float:
    """Circulation of ``A = grad-perp phi``, for which ``c0 = 0``."""
    return 2.0 * math.pi * pot.geom.rho1 * (-pot.dn_phi_inner)


def flux_at_scale(g: GaugeData, h: float) -> FluxAtScale:
    if not h > 0.0:
        raise DomainError(f"h must be positive, got {h}")
    ratio = g.c0 / h
    fl = math.floor(ratio)
    frac = ratio - fl
    if frac >= 1.0:  # ratio just below an integer can round up
        frac, fl = 0.0, fl + 1
    return FluxAtScale(h=h, gamma_hp=g.p + ratio, gamma_frac=frac, floor_c0_h=int(fl))


def real_momentum(m: int, p: int, c0: float, h: float) -> float:
    """``m - gamma_{h,p}`` evaluated so that ``(m+k, p+k)`` gives the same bits."""
    return float(int(m) - int(p)) - c0 / h

"""Limit prefactor ``f``, its integer order statistics ``alpha_k`` and predicted eigenvalues.

    f(x) = 2 sqrt(B(r_min)/pi) * (a1 q1^(2x+1) + a2 q2^(2x+1)),

with ``a1, a2`` the outward normal derivatives of ``phi`` on the inner and
outer circle and ``q1 = rho1/r_min < 1 < q2 = rho2/r_min``. The predicted
``lambda_k(h)`` is ``alpha_k(h) sqrt(h) exp(2 phi_min/h)`` where ``alpha_k``
is the k-th smallest value of ``f(m - gamma)`` over integers ``m``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .fiber_solver import LogScaled, log_scale_for
from .radial_field import ScalarPotential

OVERFLOW_CUTOFF = 500.0


@dataclass(frozen=True)
class PrefactorLaw:
    curvature: float
    r_min: float
    dn_inner: float
    dn_outer: float
    q_inner: float
    q_outer: float

    @classmethod
    def from_potential(cls, pot: ScalarPotential, use_second_derivative: bool = False) -> "PrefactorLaw":
        """Build the law from a potential.

        ``B(r_min)`` and ``phi''(r_min)`` coincide analytically; the second
        form is available to check the quadrature.
        """
        curv = pot.phi_second_min if use_second_derivative else pot.curvature
        return cls(curv, pot.r_min, pot.dn_phi_inner, pot.dn_phi_outer,
                   pot.geom.rho1 / pot.r_min, pot.geom.rho2 / pot.r_min)

    def __post_init__(self):
        if not 0.0 < self.q_inner < 1.0 < self.q_outer:
            raise DomainError("need q_inner < 1 < q_outer")
        if not (self.curvature > 0 and self.dn_inner > 0 and self.dn_outer > 0):
            raise DomainError("curvature and normal derivatives must be positive")

    @property
    def amplitude(self) -> float:
        return 2.0 * math.sqrt(self.curvature / math.pi)

    def floor(self) -> float:
        """Uniform positive lower bound of ``f``."""
        return self.amplitude * min(self.dn_inner, self.dn_outer)


def f_eval(law: PrefactorLaw, x):
    """``f(x)``; returns ``inf`` for ``|x| > 500``."""
    x_arr = np.asarray(x, dtype=float)
    e = 2.0 * x_arr + 1.0
    with np.errstate(over="ignore"):
        val = law.amplitude * (law.dn_inner * np.exp(e * math.log(law.q_inner))
                               + law.dn_outer * np.exp(e * math.log(law.q_outer)))
    val = np.where(np.abs(x_arr) > OVERFLOW_CUTOFF, np.inf, val)
    return float(val) if val.ndim == 0 else val


def f_minimizer(law: PrefactorLaw) -> float:
    """Continuous minimiser of ``f`` from the stationarity condition."""
    l1 = math.log(1.0 / law.q_inner)
    l2 = math.log(law.q_outer)
    e = math.log(law.dn_inner * l1 / (law.dn_outer * l2)) / math.log(law.q_outer / law.q_inner)
    return 0.5 * (e - 1.0)


def stationarity_residual(law: PrefactorLaw, x: float) -> float:
    e = 2.0 * x + 1.0
    lhs = law.dn_inner * math.log(1.0 / law.q_inner) * law.q_inner**e
    rhs = law.dn_outer * math.log(law.q_outer) * law.q_outer**e
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


class OrderStatistic(NamedTuple):
    value: float
    members: tuple


def alpha_k(law: PrefactorLaw, gamma_frac: float, k: int) -> OrderStatistic:
    """k-th smallest value of ``f(m - gamma_frac)`` over ``m`` in Z, with the realising set.

    Since ``f`` is convex, the values increase away from the continuous
    minimiser, so the window only has to grow until both excluded
    neighbours exceed the current k-th value. Ties prefer the smaller ``m``.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    centre = int(round(f_minimizer(law) + gamma_frac))
    half = k + 1
    while True:
        ms = np.arange(centre - half, centre + half + 1)
        vals = f_eval(law, ms - gamma_frac)
        order = np.lexsort((ms, vals))
        kth = vals[order[k - 1]]
        left = f_eval(law, centre - half - 1 - gamma_frac)
        right = f_eval(law, centre + half + 1 - gamma_frac)
        if left > kth and right > kth:
            chosen = sorted(int(m) for m in ms[order[:k]])
            return OrderStatistic(float(kth), tuple(chosen))
        half *= 2


def alpha_k_bruteforce(law: PrefactorLaw, gamma_frac: float, k: int,
                       window=(-20, 20)) -> float:
    """``min over k-subsets V of the window of max over V`` by enumeration."""
    ms = range(window[0], window[1] + 1)
    vals = {m: f_eval(law, m - gamma_frac) for m in ms}
    return min(max(vals[m] for m in sub) for sub in itertools.combinations(ms, k))


def predicted_lambda(law: PrefactorLaw, pot: ScalarPotential, gamma_frac: float,
                     k: int, h: float) -> LogScaled:
    if not h > 0.0:
        raise DomainError(f"h must be positive, got {h}")
    return LogScaled(log_scale_for(pot.phi_min, h), alpha_k(law, gamma_frac, k).value)

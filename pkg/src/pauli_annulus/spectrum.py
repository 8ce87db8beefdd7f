"""Low-lying spectrum of the spin-down Pauli block as a union over angular fibres.

For each ``h`` the fibres ``m`` (in gauge ``p``) carry real momentum
``(m - p) - c0/h``. Fibres are solved on a window centred on the integer
minimiser of ``f``; the window doubles until the outermost fibres' ground
states sit a factor four above the ``k_max``-th smallest eigenvalue found.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

from .asymptotics import PrefactorLaw, alpha_k
from .errors import CoercivityError, DomainError, NumericalGuardError
from .fiber_solver import FiberProblem, FiberSpectrum, LogScaled, solve_fiber
from .gauge import GaugeData, flux_at_scale, gauge_data, real_momentum
from .radial_field import AnnulusGeometry, RadialField, ScalarPotential, solve_scalar_potential

MAX_HALF_WIDTH = 64
GAP_SLACK = 0.99
STOP_FACTOR = 4.0


@dataclass
class SpectrumRequest:
    geom: AnnulusGeometry
    field: RadialField
    circ_int_A: float
    h_list: list
    k_max: int = 2
    p: int = 0
    n_grid: int = 4096
    m_window: int = 8
    formulation: str = "weighted"
    threads: int = 1
    eig_tol: float = 1e-12

    def __post_init__(self):
        hs = [float(h) for h in self.h_list]
        if not hs or any(not h > 0.0 for h in hs):
            raise DomainError("h_list must be a non-empty list of positive values")
        if any(a <= b for a, b in zip(hs, hs[1:])):
            raise DomainError("h_list must be strictly decreasing")
        if self.k_max < 1:
            raise DomainError("k_max must be >= 1")
        if self.m_window < 1:
            raise DomainError("m_window must be >= 1")
        self.h_list = hs


@dataclass(frozen=True)
class SpectralEntry:
    value: LogScaled
    m: int
    j: int

    def sort_key(self):
        return (self.value.log_value(), self.m, self.j)


@dataclass
class SpectrumAtScale:
    h: float
    c0: float
    gamma_frac: float
    entries: list                 # all computed (lambda, m, j), sorted
    fibers: dict                  # m -> FiberSpectrum
    predicted: list               # alpha_1..alpha_kmax
    ratios: list
    window: tuple
    law: PrefactorLaw = dc_field(repr=False)

    def lowest(self, k: int) -> list:
        return self.entries[:k]


@dataclass
class AssembledSpectrum:
    pot: ScalarPotential
    law: PrefactorLaw
    c0: float
    p: int
    scales: list


def _solve_window(pot, field, h, p, c0, ms, n_grid, formulation, eig_tol, pool):
    probs = [FiberProblem(h, real_momentum(m, p, c0, h), pot, field, n_grid, formulation,
                          eig_tol=eig_tol)
             for m in ms]
    results = list(pool.map(solve_fiber, probs)) if pool else [solve_fiber(q) for q in probs]
    return dict(zip(ms, results))


def _entries(fibers: dict) -> list:
    out = []
    for m, fs in fibers.items():
        for j in (1, 2):
            out.append(SpectralEntry(fs.eigenvalue(j), m, j))
    out.sort(key=SpectralEntry.sort_key)
    return out


def check_gap(fs: FiberSpectrum, h: float, b0: float) -> None:
    bound = 2.0 * h * b0 * GAP_SLACK
    if not fs.eigenvalue(2).value() >= bound:
        raise NumericalGuardError(
            f"lambda_2 = {fs.lambda2:.6g} below 2 h B0 = {2 * h * b0:.6g} "
            f"at m_tilde={fs.m_tilde}")


def assemble_at_scale(pot, field, law, c0, p, h, k_max, n_grid=4096, m_window=8,
                      formulation="weighted", pool=None, eig_tol=1e-12) -> SpectrumAtScale:
    flux = flux_at_scale(GaugeData(math.nan, c0, p), h)
    # integer n = m - p minimising f(n - c0/h)
    n_star = alpha_k(law, flux.gamma_frac, 1).members[0] + flux.floor_c0_h
    centre = p + n_star
    half = m_window
    fibers: dict = {}
    while True:
        if half > MAX_HALF_WIDTH:
            raise CoercivityError(
                f"m-window exceeded +-{MAX_HALF_WIDTH} around m={centre} at h={h}")
        todo = [m for m in range(centre - half, centre + half + 1) if m not in fibers]
        fibers.update(_solve_window(pot, field, h, p, c0, todo, n_grid, formulation,
                                    eig_tol, pool))
        entries = _entries(fibers)
        kth = entries[min(k_max, len(entries)) - 1].value.log_value()
        edge = min(fibers[centre - half].eigenvalue(1).log_value(),
                   fibers[centre + half].eigenvalue(1).log_value())
        if edge - kth >= math.log(STOP_FACTOR):
            break
        half *= 2
    for fs in fibers.values():
        check_gap(fs, h, pot.B0)
    fibers = dict(sorted(fibers.items()))
    predicted = [alpha_k(law, flux.gamma_frac, k).value for k in range(1, k_max + 1)]
    ratios = [e.value.mantissa / a for e, a in zip(entries[:k_max], predicted)]
    return SpectrumAtScale(h, c0, flux.gamma_frac, entries, fibers, predicted, ratios,
                           (centre - half, centre + half), law)


def _pool(threads: int):
    return ThreadPoolExecutor(max_workers=threads) if threads > 1 else None


def assemble(req: SpectrumRequest, pot: ScalarPotential | None = None) -> AssembledSpectrum:
    if pot is None:
        pot = solve_scalar_potential(req.geom, req.field, req.n_grid)
    law = PrefactorLaw.from_potential(pot)
    c0 = gauge_data(pot, req.circ_int_A, req.p).c0
    pool = _pool(req.threads)
    try:
        scales = [assemble_at_scale(pot, req.field, law, c0, req.p, h, req.k_max,
                                    req.n_grid, req.m_window, req.formulation, pool,
                                    req.eig_tol)
                  for h in req.h_list]
    finally:
        if pool is not None:
            pool.shutdown()
    return AssembledSpectrum(pot, law, c0, req.p, scales)


@dataclass(frozen=True)
class ABRow:
    h: float
    gamma_frac: float
    m: int
    numeric_prefactor: float
    predicted_prefactor: float


def ab_sweep(req: SpectrumRequest, pot: ScalarPotential | None = None) -> list:
    """Ground-state prefactor against the fractional flux ``c0/h mod 1``."""
    one = dataclasses.replace(req, k_max=1)
    spec = assemble(one, pot)
    rows = []
    for s in spec.scales:
        e = s.entries[0]
        rows.append(ABRow(s.h, s.gamma_frac, e.m, e.value.mantissa, s.predicted[0]))
    return rows


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    ratios: tuple
    deltas: tuple          # |ratio_k - 1| minus the previous row's value
    monotone: tuple        # whether |ratio_k - 1| decreased from the previous row


def convergence_study(req: SpectrumRequest, pot: ScalarPotential | None = None) -> list:
    if len(req.h_list) < 3:
        raise DomainError("convergence_study needs at least 3 h values")
    spec = assemble(req, pot)
    rows = []
    prev = None
    for s in spec.scales:
        err = tuple(abs(r - 1.0) for r in s.ratios)
        if prev is None:
            deltas = tuple(math.nan for _ in err)
            mono = tuple(True for _ in err)
        else:
            deltas = tuple(e - q for e, q in zip(err, prev))
            mono = tuple(e < q for e, q in zip(err, prev))
        rows.append(ConvergenceRow(s.h, tuple(s.ratios), deltas, mono))
        prev = err
    return rows

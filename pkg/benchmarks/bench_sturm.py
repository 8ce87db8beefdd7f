"""Compare the compiled Sturm kernel with the pure-Python fallback.

    python3 benchmarks/bench_sturm.py [--n 4096] [--repeat 3]
"""

import argparse
import time

import numpy as np

from pauli_annulus import _sturm_py, tridiag
from pauli_annulus import AnnulusGeometry, FiberProblem, RadialField, solve_scalar_potential
from pauli_annulus.fiber_solver import fiber_eigenvalues


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    d = rng.normal(size=args.n)
    e2 = rng.random(args.n - 1)
    pivmin = np.finfo(float).tiny * max(1.0, e2.max())
    lo, hi = -10.0, 10.0

    kernels = {"python": _sturm_py}
    if tridiag.BACKEND == "compiled":
        kernels["compiled"] = tridiag._kernel
    else:
        print("compiled kernel not built; run `python3 setup.py build_ext --inplace`")

    print(f"random tridiagonal, n = {args.n}: two smallest eigenvalues by bisection")
    ref = None
    timing = {}
    for name, mod in kernels.items():
        dt, vals = best_of(lambda: [mod.bisect_eigenvalue(d, e2, j, lo, hi, 1e-12, 1e-300, pivmin)
                                    for j in (0, 1)], args.repeat)
        timing[name] = dt
        ref = vals if ref is None else ref
        print(f"  {name:>8}: {dt * 1e3:9.2f} ms   max diff {max(abs(a - b) for a, b in zip(vals, ref)):.1e}")
    if len(timing) == 2:
        print(f"  speed-up {timing['python'] / timing['compiled']:.0f}x")

    geom = AnnulusGeometry(1.0, 2.0)
    field = RadialField.constant(1.0)
    pot = solve_scalar_potential(geom, field, args.n)
    prob = FiberProblem(0.05, 0.0, pot, field, args.n)
    dt, _ = best_of(lambda: fiber_eigenvalues(prob), args.repeat)
    print(f"one weighted fibre solve at h = 0.05 with the active backend ({tridiag.BACKEND}): "
          f"{dt * 1e3:.1f} ms")


if __name__ == "__main__":
    main()

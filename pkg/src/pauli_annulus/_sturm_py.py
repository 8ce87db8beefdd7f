"""Pure-Python Sturm-sequence kernels (fallback for the compiled module).

The count uses the LDL^T pivot recurrence ``d_i = a_i - x - b_{i-1}^2 / d_{i-1}``;
the number of negative pivots equals the number of eigenvalues below ``x``.
Pivots smaller than ``pivmin`` in magnitude are replaced by ``-pivmin``.

Bisection switches to the geometric midpoint once the bracket lies on one
side of zero and spans more than a factor two, so tiny eigenvalues are
located in a number of steps logarithmic in their exponent.
"""

import math


def sturm_count(diag, off2, x, pivmin):
    """Number of eigenvalues strictly below ``x``."""
    a = diag.tolist() if hasattr(diag, "tolist") else list(diag)
    e2 = off2.tolist() if hasattr(off2, "tolist") else list(off2)
    return _count(a, e2, x, pivmin)


def _count(a, e2, x, pivmin):
    d = a[0] - x
    if abs(d) < pivmin:
        d = -pivmin
    cnt = 1 if d < 0.0 else 0
    for ai, bi in zip(a[1:], e2):
        d = ai - x - bi / d
        if abs(d) < pivmin:
            d = -pivmin
        if d < 0.0:
            cnt += 1
    return cnt


def _mid(lo, hi):
    if lo > 0.0 and hi > 2.0 * lo:
        return math.sqrt(lo) * math.sqrt(hi)
    if hi < 0.0 and lo < 2.0 * hi:
        return -math.sqrt(-lo) * math.sqrt(-hi)
    if lo < 0.0 < hi:
        return 0.0
    return 0.5 * (lo + hi)


def bisect_eigenvalue(diag, off2, index, lo, hi, rtol, atol, pivmin, max_iter=4000):
    """Eigenvalue number ``index`` (0-based, ascending) inside ``[lo, hi]``."""
    a = diag.tolist() if hasattr(diag, "tolist") else list(diag)
    e2 = off2.tolist() if hasattr(off2, "tolist") else list(off2)
    for _ in range(max_iter):
        if hi - lo <= rtol * max(abs(lo), abs(hi)) or hi - lo <= atol:
            break
        if lo == 0.0 and hi > atol:
            if _count(a, e2, atol, pivmin) > index:
                hi = atol
            else:
                lo = atol
            continue
        if hi == 0.0 and lo < -atol:
            if _count(a, e2, -atol, pivmin) <= index:
                lo = -atol
            else:
                hi = -atol
            continue
        mid = _mid(lo, hi)
        if mid <= lo or mid >= hi:
            break
        if _count(a, e2, mid, pivmin) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)

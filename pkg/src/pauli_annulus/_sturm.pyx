# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Sturm-sequence kernels for symmetric tridiagonal matrices.

Mirrors :mod:`pauli_annulus._sturm_py` exactly; see that module for the
algorithmic description.
"""

from libc.math cimport fabs, sqrt


cdef Py_ssize_t _count(const double[::1] diag, const double[::1] off2,
                       double x, double pivmin) noexcept nogil:
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t i, cnt = 0
    cdef double d = diag[0] - x
    if fabs(d) < pivmin:
        d = -pivmin
    if d < 0.0:
        cnt += 1
    for i in range(1, n):
        d = diag[i] - x - off2[i - 1] / d
        if fabs(d) < pivmin:
            d = -pivmin
        if d < 0.0:
            cnt += 1
    return cnt


def sturm_count(const double[::1] diag, const double[::1] off2, double x,
                double pivmin):
    """Number of eigenvalues strictly below ``x``."""
    cdef Py_ssize_t c
    with nogil:
        c = _count(diag, off2, x, pivmin)
    return c


cdef double _mid(double lo, double hi) noexcept nogil:
    if lo > 0.0 and hi > 2.0 * lo:
        return sqrt(lo) * sqrt(hi)
    if hi < 0.0 and lo < 2.0 * hi:
        return -sqrt(-lo) * sqrt(-hi)
    if lo < 0.0 and hi > 0.0:
        return 0.0
    return 0.5 * (lo + hi)


def bisect_eigenvalue(const double[::1] diag, const double[::1] off2,
                      Py_ssize_t index, double lo, double hi, double rtol,
                      double atol, double pivmin, Py_ssize_t max_iter=4000):
    """Eigenvalue number ``index`` (0-based, ascending) inside ``[lo, hi]``."""
    cdef double mid
    cdef Py_ssize_t it = 0
    with nogil:
        while it < max_iter:
            it += 1
            if hi - lo <= rtol * max(fabs(lo), fabs(hi)) or hi - lo <= atol:
                break
            if lo == 0.0 and hi > atol:
                if _count(diag, off2, atol, pivmin) > index:
                    hi = atol
                    continue
                lo = atol
                continue
            if hi == 0.0 and lo < -atol:
                if _count(diag, off2, -atol, pivmin) <= index:
                    lo = -atol
                    continue
                hi = -atol
                continue
            mid = _mid(lo, hi)
            if mid <= lo or mid >= hi:
                break
            if _count(diag, off2, mid, pivmin) > index:
                hi = mid
            else:
                lo = mid
    return 0.5 * (lo + hi)

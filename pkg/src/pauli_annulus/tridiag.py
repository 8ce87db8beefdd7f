"""Symmetric tridiagonal matrices and Sturm-bisection eigenvalue extraction.

The compiled kernel (``_sturm``) is used when it was built; otherwise the
pure-Python module is loaded. Setting ``PAULI_ANNULUS_PURE_PYTHON=1`` forces
the fallback.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvariantError

if os.environ.get("PAULI_ANNULUS_PURE_PYTHON", "") not in ("", "0"):
    from . import _sturm_py as _kernel
    BACKEND = "python"
else:
    try:
        from . import _sturm as _kernel  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        from . import _sturm_py as _kernel
        BACKEND = "python"

_SAFMIN = np.finfo(float).tiny
ABS_FLOOR = 1e-300


@dataclass(frozen=True)
class TridiagonalSym:
    """Real symmetric tridiagonal matrix stored by its two diagonals."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.ascontiguousarray(self.diag, dtype=float)
        off = np.ascontiguousarray(self.offdiag, dtype=float)
        if diag.ndim != 1 or off.ndim != 1 or diag.size < 1:
            raise DomainError("diag/offdiag must be non-empty 1-D arrays")
        if off.size != diag.size - 1:
            raise DomainError(
                f"offdiag has {off.size} entries, expected {diag.size - 1}")
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
            raise InvariantError("non-finite entry in tridiagonal matrix")
        diag.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    @property
    def size(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diag) + np.diag(self.offdiag, 1)
                + np.diag(self.offdiag, -1))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.offdiag * x[1:]
        y[1:] += self.offdiag * x[:-1]
        return y

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros_like(self.diag)
        r[:-1] += np.abs(self.offdiag)
        r[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))


def _pivmin(off2: np.ndarray) -> float:
    top = float(off2.max()) if off2.size else 0.0
    return _SAFMIN * max(1.0, top)


def count_below(mat: TridiagonalSym, x: float) -> int:
    """Number of eigenvalues of ``mat`` strictly smaller than ``x``."""
    off2 = np.ascontiguousarray(mat.offdiag**2)
    return int(_kernel.sturm_count(mat.diag, off2, float(x), _pivmin(off2)))


def eigenvalues_by_index(mat: TridiagonalSym, indices, rtol: float = 1e-12,
                         atol: float = ABS_FLOOR,
                         bracket: tuple[float, float] | None = None) -> np.ndarray:
    """Eigenvalues with the given 0-based ascending indices, by bisection."""
    off2 = np.ascontiguousarray(mat.offdiag**2)
    pivmin = _pivmin(off2)
    lo0, hi0 = bracket if bracket is not None else mat.gershgorin()
    # widen by a few ulps of the spectral radius so the bracket is strict
    pad = 4.0 * np.finfo(float).eps * max(abs(lo0), abs(hi0), 1.0)
    if bracket is None:
        lo0, hi0 = lo0 - pad, hi0 + pad
    out = []
    for idx in indices:
        if not 0 <= idx < mat.size:
            raise DomainError(f"eigenvalue index {idx} out of range for size {mat.size}")
        out.append(_kernel.bisect_eigenvalue(
            mat.diag, off2, int(idx), float(lo0), float(hi0), float(rtol),
            float(atol), pivmin))
    return np.asarray(out)


def smallest_eigenvalues(mat: TridiagonalSym, k: int, rtol: float = 1e-12) -> np.ndarray:
    """The ``k`` algebraically smallest eigenvalues in ascending order."""
    if k < 1 or k > mat.size:
        raise DomainError(f"k={k} must satisfy 1 <= k <= size={mat.size}")
    return eigenvalues_by_index(mat, range(k), rtol=rtol)


def golub_kahan(path: np.ndarray) -> TridiagonalSym:
    """Zero-diagonal tridiagonal whose eigenvalues are +-(singular values).

    ``path`` lists the bidiagonal entries in the order they are met when
    walking the bidiagonal from its top-left entry.
    """
    path = np.asarray(path, dtype=float)
    return TridiagonalSym(np.zeros(path.size + 1), path)


def smallest_singular_values(path: np.ndarray, n_cols: int, k: int,
                             rtol: float = 1e-12) -> np.ndarray:
    """``k`` smallest singular values of a bidiagonal with ``n_cols`` columns.

    Bisection on the Golub-Kahan matrix keeps high relative accuracy for
    tiny singular values, which a direct Sturm count on ``B^T B`` loses.
    The bidiagonal must have full column rank.
    """
    gk = golub_kahan(path)
    if k < 1 or k > n_cols:
        raise DomainError(f"k={k} must satisfy 1 <= k <= n_cols={n_cols}")
    hi = float(np.max(np.abs(path))) * 2.0 * (1.0 + 1e-12)
    first = gk.size - n_cols
    return eigenvalues_by_index(gk, range(first, first + k), rtol=rtol,
                                bracket=(0.0, hi))


def log_sum_exp(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    top = float(np.max(values))
    if not math.isfinite(top):
        return top
    return top + math.log(float(np.sum(np.exp(values - top))))

"""Complex band storage and a pivot-free banded LU.

Rows are stored with their band: ``data[i, kl + (j - i)] == A[i, j]`` for
``-kl <= j - i <= ku``.  Row storage keeps both the pivot row and the
updated row contiguous inside the elimination loop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


class PivotBreakdownError(ArithmeticError):
    """A pivot fell below the breakdown threshold during elimination."""

    def __init__(self, index: int, value: complex, threshold: float):
        super().__init__(
            f"pivot breakdown at row {index}: |pivot|={abs(value):.3e} "
            f"below threshold {threshold:.3e}"
        )
        self.index = index
        self.value = value
        self.threshold = threshold


@dataclass(frozen=True)
class BandedMatrix:
    n: int
    kl: int
    ku: int
    data: np.ndarray  # shape (n, kl + ku + 1)

    def __post_init__(self):
        if self.data.shape != (self.n, self.kl + self.ku + 1):
            raise ValueError(
                f"band storage shape {self.data.shape} inconsistent with "
                f"n={self.n}, kl={self.kl}, ku={self.ku}"
            )

    @classmethod
    def zeros(cls, n: int, kl: int, ku: int) -> "BandedMatrix":
        return cls(n, kl, ku, np.zeros((n, kl + ku + 1), dtype=complex))

    @classmethod
    def from_dense(cls, A, kl: int, ku: int) -> "BandedMatrix":
        A = np.asarray(A, dtype=complex)
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError("matrix must be square")
        i, j = np.nonzero(A)
        if np.any((j - i > ku) | (i - j > kl)):
            raise ValueError("matrix has entries outside the declared band")
        out = cls.zeros(n, kl, ku)
        for off in range(-kl, ku + 1):
            d = np.diagonal(A, off)
            rows = np.arange(max(0, -off), max(0, -off) + d.size)
            out.data[rows, kl + off] = d
        return out

    def set(self, i: int, j: int, value) -> None:
        off = j - i
        if off < -self.kl or off > self.ku:
            raise IndexError(f"entry ({i}, {j}) outside band")
        self.data[i, self.kl + off] = value

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=complex)
        for off in range(-self.kl, self.ku + 1):
            lo = max(0, -off)
            hi = min(self.n, self.n - off)
            if hi <= lo:
                continue
            rows = np.arange(lo, hi)
            A[rows, rows + off] = self.data[rows, self.kl + off]
        return A

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return _band_matvec(self.data, self.kl, self.ku, x.reshape(self.n, -1)).reshape(x.shape)


@dataclass(frozen=True)
class BandedLU:
    """Unit-lower L and upper U packed into one band array."""

    n: int
    kl: int
    ku: int
    data: np.ndarray


@njit(cache=True)
def _band_matvec(data, kl, ku, x):
    n = data.shape[0]
    out = np.zeros(x.shape, dtype=np.complex128)
    for i in range(n):
        j0 = max(0, i - kl)
        j1 = min(n, i + ku + 1)
        for j in range(j0, j1):
            a = data[i, kl + j - i]
            for r in range(x.shape[1]):
                out[i, r] += a * x[j, r]
    return out


@njit(cache=True)
def _band_lu_inplace(data, kl, ku, threshold):
    n = data.shape[0]
    for k in range(n):
        piv = data[k, kl]
        if abs(piv) <= threshold:
            return k
        i1 = min(n, k + kl + 1)
        j1 = min(n, k + ku + 1)
        for i in range(k + 1, i1):
            lik = data[i, kl + k - i] / piv
            data[i, kl + k - i] = lik
            if lik == 0:
                continue
            base_i = kl - i
            base_k = kl - k
            for j in range(k + 1, j1):
                data[i, base_i + j] -= lik * data[k, base_k + j]
    return -1


@njit(cache=True)
def _band_solve_inplace(data, kl, ku, b):
    n = data.shape[0]
    nr = b.shape[1]
    for i in range(n):
        j0 = max(0, i - kl)
        for j in range(j0, i):
            lij = data[i, kl + j - i]
            for r in range(nr):
                b[i, r] -= lij * b[j, r]
    for i in range(n - 1, -1, -1):
        j1 = min(n, i + ku + 1)
        for j in range(i + 1, j1):
            uij = data[i, kl + j - i]
            for r in range(nr):
                b[i, r] -= uij * b[j, r]
        d = data[i, kl]
        for r in range(nr):
            b[i, r] /= d


@njit(cache=True)
def _band_solve_vec_inplace(data, kl, ku, b):
    n = data.shape[0]
    for i in range(n):
        acc = b[i]
        for j in range(max(0, i - kl), i):
            acc -= data[i, kl + j - i] * b[j]
        b[i] = acc
    for i in range(n - 1, -1, -1):
        acc = b[i]
        for j in range(i + 1, min(n, i + ku + 1)):
            acc -= data[i, kl + j - i] * b[j]
        b[i] = acc / data[i, kl]


def banded_lu(A: BandedMatrix, rtol: float = 1e-14) -> BandedLU:
    """Factor without pivoting; raises PivotBreakdownError on a tiny pivot.

    The threshold is ``rtol`` times the largest entry magnitude of ``A``.
    """
    work = np.array(A.data, dtype=np.complex128, copy=True)
    scale = float(np.max(np.abs(work))) if work.size else 0.0
    threshold = rtol * scale if scale > 0 else 0.0
    bad = _band_lu_inplace(work, A.kl, A.ku, threshold)
    if bad >= 0:
        raise PivotBreakdownError(bad, complex(work[bad, A.kl]), threshold)
    return BandedLU(A.n, A.kl, A.ku, work)


def banded_solve(lu: BandedLU, b) -> np.ndarray:
    """Solve ``A x = b``; ``b`` may be a vector or an (n, nrhs) array."""
    b = np.asarray(b)
    if b.shape[0] != lu.n:
        raise ValueError(f"right-hand side length {b.shape[0]} != {lu.n}")
    x = np.array(b, dtype=np.complex128, copy=True)
    if x.ndim == 1:
        _band_solve_vec_inplace(lu.data, lu.kl, lu.ku, x)
        return x
    x = np.ascontiguousarray(x.reshape(lu.n, -1))
    _band_solve_inplace(lu.data, lu.kl, lu.ku, x)
    return x.reshape(b.shape)

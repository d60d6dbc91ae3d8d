"""Legendre polynomials, LGL quadrature, discrete transforms and the
Robin-adapted Legendre basis with its stiffness/mass matrices."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .banded import (
    BandedLU,
    BandedMatrix,
    PivotBreakdownError,
    banded_lu,
    banded_solve,
)

__all__ = [
    "LglGrid",
    "SpectralBasis1D",
    "SystemMatrices1D",
    "BandedMatrix",
    "BandedLU",
    "PivotBreakdownError",
    "banded_lu",
    "banded_solve",
    "legendre_eval_all",
    "lgl_grid",
    "legendre_transform",
    "inverse_transform",
    "legendre_transform_2d",
    "inverse_transform_2d",
    "build_basis",
    "assemble_system_1d",
    "project_rhs",
    "d1_legendre_coeffs",
    "d2_legendre_coeffs",
    "legendre_norms",
]

NEWTON_TOL = 1e-15
NEWTON_MAXITER = 100


def legendre_eval_all(N: int, y) -> np.ndarray:
    """Rows are L_0..L_N evaluated at ``y`` (scalar or array)."""
    if N < 0:
        raise ValueError("N must be non-negative")
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) > 1.0):
        raise ValueError("Legendre evaluation requires |y| <= 1")
    out = np.empty((N + 1,) + y.shape)
    out[0] = 1.0
    if N >= 1:
        out[1] = y
    for n in range(1, N):
        out[n + 1] = ((2 * n + 1) * y * out[n] - n * out[n - 1]) / (n + 1)
    return out


def legendre_norms(N: int) -> np.ndarray:
    """gamma_k = 2/(2k+1), k = 0..N."""
    return 2.0 / (2.0 * np.arange(N + 1) + 1.0)


@dataclass(frozen=True)
class LglGrid:
    N: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=64)
def lgl_grid(N: int) -> LglGrid:
    """Legendre-Gauss-Lobatto nodes (ascending) and weights of order N."""
    if N < 1:
        raise ValueError("LGL grid needs N >= 1")
    # Newton on y L_N - L_{N-1}, whose roots are the LGL nodes,
    # starting from Chebyshev-Gauss-Lobatto points.
    y = np.cos(np.pi * np.arange(N + 1) / N)
    for _ in range(NEWTON_MAXITER):
        L = legendre_eval_all(N, np.clip(y, -1.0, 1.0))
        step = (y * L[N] - L[N - 1]) / ((N + 1) * L[N])
        y = y - step
        if np.max(np.abs(step)) < NEWTON_TOL:
            break
    else:
        raise RuntimeError(f"LGL Newton iteration did not converge for N={N}")
    y = np.sort(y)
    y[0], y[-1] = -1.0, 1.0
    if N % 2 == 0:
        y[N // 2] = 0.0
    y = 0.5 * (y - y[::-1])  # enforce exact symmetry
    LN = legendre_eval_all(N, y)[N]
    w = 2.0 / (N * (N + 1) * LN**2)
    y.setflags(write=False)
    w.setflags(write=False)
    return LglGrid(N, y, w)


@lru_cache(maxsize=64)
def _transform_matrices(N: int):
    g = lgl_grid(N)
    V = legendre_eval_all(N, g.nodes).T  # V[node, mode]
    norms = legendre_norms(N)
    norms[N] = 2.0 / N  # discrete norm of L_N on the LGL grid
    F = (V * g.weights[:, None]).T / norms[:, None]  # F[mode, node]
    V.setflags(write=False)
    F.setflags(write=False)
    return V, F


def legendre_transform(samples, N: int | None = None) -> np.ndarray:
    """Nodal values on the LGL grid -> Legendre coefficients (along axis 0)."""
    samples = np.asarray(samples)
    n = samples.shape[0]
    if N is None:
        N = n - 1
    if n != N + 1:
        raise ValueError(f"expected {N + 1} samples, got {n}")
    _, F = _transform_matrices(N)
    return np.tensordot(F, samples, axes=(1, 0))


def inverse_transform(coeffs, N: int | None = None) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    n = coeffs.shape[0]
    if N is None:
        N = n - 1
    if n != N + 1:
        raise ValueError(f"expected {N + 1} coefficients, got {n}")
    V, _ = _transform_matrices(N)
    return np.tensordot(V, coeffs, axes=(1, 0))


def legendre_transform_2d(U) -> np.ndarray:
    U = np.asarray(U)
    _, F1 = _transform_matrices(U.shape[0] - 1)
    _, F2 = _transform_matrices(U.shape[1] - 1)
    return F1 @ U @ F2.T


def inverse_transform_2d(C) -> np.ndarray:
    C = np.asarray(C)
    V1, _ = _transform_matrices(C.shape[0] - 1)
    V2, _ = _transform_matrices(C.shape[1] - 1)
    return V1 @ C @ V2.T


@dataclass(frozen=True)
class SpectralBasis1D:
    """phi_p = L_p + b_p L_{p+2}, p = 0..N-2, each satisfying
    (d/dy - kappa) phi(-1) = 0 and (d/dy + kappa) phi(+1) = 0."""

    N: int
    kappa: complex
    b: np.ndarray
    gamma: np.ndarray

    def to_legendre(self, w_hat) -> np.ndarray:
        """Change of basis: adapted coefficients -> Legendre coefficients.

        Works along axis 0, so matrices of coefficient columns are accepted.
        """
        w_hat = np.asarray(w_hat)
        if w_hat.shape[0] != self.N - 1:
            raise ValueError(f"expected {self.N - 1} basis coefficients")
        bshape = (-1,) + (1,) * (w_hat.ndim - 1)
        out = np.zeros((self.N + 1,) + w_hat.shape[1:], dtype=complex)
        out[: self.N - 1] += w_hat
        out[2:] += self.b.reshape(bshape) * w_hat
        return out

    def change_matrix(self) -> np.ndarray:
        """Dense (N+1) x (N-1) matrix B with columns = Legendre coefficients of phi_p."""
        return self.to_legendre(np.eye(self.N - 1))


def build_basis(N: int, kappa: complex) -> SpectralBasis1D:
    if N < 2:
        raise ValueError("the adapted basis needs N >= 2")
    kappa = complex(kappa)
    p = np.arange(N - 1)
    den = kappa + 0.5 * (p + 2) * (p + 3)
    if np.any(den == 0):
        raise ValueError(f"inadmissible Robin parameter kappa={kappa}")
    b = -(kappa + 0.5 * p * (p + 1)) / den
    b.setflags(write=False)
    gamma = legendre_norms(N)
    gamma.setflags(write=False)
    return SpectralBasis1D(N, kappa, b, gamma)


@dataclass(frozen=True)
class SystemMatrices1D:
    basis: SpectralBasis1D
    S: np.ndarray  # diagonal of the stiffness matrix
    M: BandedMatrix  # pentadiagonal symmetric mass matrix, kl = ku = 2

    def quadrature_matrix(self) -> np.ndarray:
        """Q = B^T as a dense (N-1) x (N+1) array."""
        return self.basis.change_matrix().T

    def helmholtz(self, inv_alpha2: complex) -> BandedMatrix:
        """inv_alpha2 * S + M in band storage."""
        data = self.M.data.copy()
        data[:, 2] += inv_alpha2 * self.S
        return BandedMatrix(self.M.n, 2, 2, data)


def assemble_system_1d(basis: SpectralBasis1D) -> SystemMatrices1D:
    N = basis.N
    k = np.arange(N - 1)
    b = basis.b
    S = -2.0 * (2 * k + 3) * b
    M = BandedMatrix.zeros(N - 1, 2, 2)
    M.data[:, 2] = 2.0 / (2 * k + 1) + 2.0 * b**2 / (2 * k + 5)
    off = 2.0 * b[: N - 3] / (2 * k[: N - 3] + 5)  # (k, k+2) and (k+2, k)
    M.data[: N - 3, 4] = off
    M.data[2:, 0] = off
    return SystemMatrices1D(basis, S, M)


def project_rhs(basis: SpectralBasis1D, f_coeffs) -> np.ndarray:
    """g_p = (f, phi_p) from Legendre coefficients of f (along axis 0)."""
    f = np.asarray(f_coeffs)
    N = basis.N
    if f.shape[0] != N + 1:
        raise ValueError(f"expected {N + 1} Legendre coefficients, got {f.shape[0]}")
    bshape = (-1,) + (1,) * (f.ndim - 1)
    gam = basis.gamma.reshape((-1,) + (1,) * (f.ndim - 1))
    gf = gam * f
    return gf[: N - 1] + basis.b.reshape(bshape) * gf[2:]


def d1_legendre_coeffs(coeffs) -> np.ndarray:
    """Legendre coefficients of the first derivative (along axis 0).

    Descending recurrence  a'_{p-1} = (2p-1) (a_p + a'_{p+1} / (2p+3)).
    """
    a = np.asarray(coeffs)
    n = a.shape[0]
    out = np.zeros(a.shape, dtype=np.result_type(a.dtype, float))
    if n < 2:
        return out
    N = n - 1
    out[N - 1] = (2 * N - 1) * a[N]
    for p in range(N - 1, 0, -1):
        out[p - 1] = (2 * p - 1) * (a[p] + out[p + 1] / (2 * p + 3))
    return out


def d2_legendre_coeffs(coeffs) -> np.ndarray:
    """Legendre coefficients of the second derivative (along axis 0)."""
    return d1_legendre_coeffs(d1_legendre_coeffs(coeffs))

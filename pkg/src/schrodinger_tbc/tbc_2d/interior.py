"""Tensor Legendre-Galerkin solve of -a1^{-2} d_1^2 w - a2^{-2} d_2^2 w + w = f
in the Robin-adapted tensor space, via one banded LU of the Kronecker system

    (a1^{-2} M2 (x) S1 + a2^{-2} S2 (x) M1 + M2 (x) M1) vec(W) = vec(Q1 G1 F G2 Q2^T),

with column-stacked unknowns (index p1 + (N1-1) p2), bandwidth 2 N1.

Every factor couples only modes of equal parity, so the system splits into
four independent blocks (parity of p1, parity of p2).  Each block is again
banded, with half the bandwidth and a quarter of the unknowns; the solver
factors and solves the blocks, which is 16x cheaper to factor and about 4x
cheaper per solve than the full band.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..banded import BandedMatrix, banded_lu, banded_solve
from ..spectral_core import SystemMatrices1D, assemble_system_1d, build_basis, project_rhs
from .lifting import Lifting2D, helmholtz_apply, lift_2d, lift_field


def kronecker_system(sys1: SystemMatrices1D, sys2: SystemMatrices1D, alpha1, alpha2):
    """Sparse CSR matrix of the 2D Galerkin system."""
    S1 = sp.diags(sys1.S)
    S2 = sp.diags(sys2.S)
    M1 = sp.csr_matrix(sys1.M.to_dense())
    M2 = sp.csr_matrix(sys2.M.to_dense())
    A = (
        alpha1**-2 * sp.kron(M2.T, S1.T)
        + alpha2**-2 * sp.kron(S2, M1)
        + sp.kron(M2, M1)
    )
    return A.tocsr()


def sparse_to_band(A, kl: int, ku: int) -> BandedMatrix:
    coo = A.tocoo()
    out = BandedMatrix.zeros(A.shape[0], kl, ku)
    off = coo.col - coo.row
    if np.any((off > ku) | (-off > kl)):
        raise ValueError("entries outside the declared band")
    np.add.at(out.data, (coo.row, kl + off), coo.data)
    return out


class InteriorSolver:
    """Factored once for fixed (N1, N2, alpha1, alpha2, kappa1, kappa2)."""

    def __init__(self, N1: int, N2: int, alpha1, alpha2, kappa1, kappa2):
        self.N1, self.N2 = N1, N2
        self.alpha1, self.alpha2 = complex(alpha1), complex(alpha2)
        self.basis1 = build_basis(N1, kappa1)
        self.basis2 = build_basis(N2, kappa2)
        self.sys1 = assemble_system_1d(self.basis1)
        self.sys2 = assemble_system_1d(self.basis2)
        self.lifting: Lifting2D = lift_2d(kappa1, kappa2)
        self.bandwidth = 2 * (N1 - 1) + 2
        self.matrix = kronecker_system(self.sys1, self.sys2, self.alpha1, self.alpha2)
        n1, n2 = N1 - 1, N2 - 1
        self.blocks = []
        A = self.matrix.tocsr()
        for e2 in (0, 1):
            for e1 in (0, 1):
                P1 = np.arange(e1, n1, 2)
                P2 = np.arange(e2, n2, 2)
                if P1.size == 0 or P2.size == 0:
                    continue
                idx = (P1[:, None] + n1 * P2[None, :]).ravel(order="F")
                sub = A[idx][:, idx]
                bw = P1.size + 1
                lu = banded_lu(sparse_to_band(sub, bw, bw))
                self.blocks.append((idx, lu))

    def full_band(self) -> BandedMatrix:
        """The undivided system in band storage (bandwidth 2 N1)."""
        return sparse_to_band(self.matrix, self.bandwidth, self.bandwidth)

    @property
    def shape(self):
        return (self.N1 + 1, self.N2 + 1)

    def project(self, F) -> np.ndarray:
        """Q1 Gamma1 F Gamma2 Q2^T."""
        G = project_rhs(self.basis1, F)
        return project_rhs(self.basis2, G.T).T

    def solve_adapted(self, F_hat) -> np.ndarray:
        n1, n2 = self.N1 - 1, self.N2 - 1
        rhs = np.asarray(F_hat, dtype=complex).reshape(n1 * n2, order="F")
        w = np.empty_like(rhs)
        for idx, lu in self.blocks:
            w[idx] = banded_solve(lu, rhs[idx])
        return w.reshape((n1, n2), order="F")

    def to_legendre(self, W_hat) -> np.ndarray:
        W = self.basis1.to_legendre(W_hat)
        return self.basis2.to_legendre(W.T).T

    def lift(self, B: dict, C: dict) -> np.ndarray:
        return lift_field(self.lifting, B, C, self.alpha1, self.alpha2, self.shape)

    def assemble_rhs(self, U, chi) -> np.ndarray:
        """F = U - (1 - a1^{-2} d_1^2 - a2^{-2} d_2^2) chi."""
        return np.asarray(U) - helmholtz_apply(chi, self.alpha1, self.alpha2)

    def solve(self, U, B: dict, C: dict) -> np.ndarray:
        """Legendre coefficients of the lifted solution for source U and
        boundary data (B on segments, C at corners)."""
        chi = self.lift(B, C)
        F = self.assemble_rhs(U, chi)
        W_hat = self.solve_adapted(self.project(F))
        return self.to_legendre(W_hat) + chi

"""Robin-Helmholtz step on [-1, 1]:

    -alpha^{-2} u'' + u = f,
    (u' - kappa u)(-1) = +alpha B_minus,   (u' + kappa u)(+1) = -alpha B_plus,

solved by lifting the boundary data onto degree-one polynomials and a
Galerkin solve in the Robin-adapted basis.  Every segment and auxiliary
field update in the 2D schemes reduces to this step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral_core import (
    BandedLU,
    SpectralBasis1D,
    SystemMatrices1D,
    assemble_system_1d,
    banded_lu,
    banded_solve,
    build_basis,
    project_rhs,
)

__all__ = [
    "Lifting1D",
    "RobinStepConfig",
    "make_lifting",
    "make_robin_config",
    "robin_step",
    "boundary_traces",
    "endpoint_values",
]


@dataclass(frozen=True)
class Lifting1D:
    """chi_minus, chi_plus: coefficient pairs (c0, c1) of c0 L_0 + c1 L_1.

    (d - kappa) chi_minus(-1) = 1, (d + kappa) chi_minus(+1) = 0 and the
    mirrored pattern for chi_plus.
    """

    kappa: complex
    chi_minus: tuple[complex, complex]
    chi_plus: tuple[complex, complex]

    def as_vector(self, which: str, n: int) -> np.ndarray:
        v = np.zeros(n, dtype=complex)
        c = self.chi_minus if which == "minus" else self.chi_plus
        v[0], v[1] = c
        return v


def make_lifting(kappa: complex) -> Lifting1D:
    kappa = complex(kappa)
    if kappa == 0 or kappa == -1:
        raise ValueError(f"lifting is singular for kappa={kappa}")
    c1 = 1.0 / (2.0 * (kappa + 1.0))
    c0 = 1.0 / (2.0 * kappa)
    return Lifting1D(kappa, (-c0, c1), (c0, c1))


def boundary_traces(u):
    """(u(-1), u(+1), u'(-1), u'(+1)) of Legendre coefficients along axis 0."""
    u = np.asarray(u)
    n = np.arange(u.shape[0])
    shape = (-1,) + (1,) * (u.ndim - 1)
    sgn = ((-1.0) ** n).reshape(shape)
    dpl = (0.5 * n * (n + 1)).reshape(shape)
    vp = u.sum(axis=0)
    vm = (sgn * u).sum(axis=0)
    dp = (dpl * u).sum(axis=0)
    dm = (-sgn * dpl * u).sum(axis=0)
    return vm, vp, dm, dp


def endpoint_values(u):
    """(u(-1), u(+1)) along axis 0."""
    u = np.asarray(u)
    sgn = ((-1.0) ** np.arange(u.shape[0])).reshape((-1,) + (1,) * (u.ndim - 1))
    return (sgn * u).sum(axis=0), u.sum(axis=0)


@dataclass(frozen=True)
class RobinStepConfig:
    alpha: complex
    kappa: complex
    basis: SpectralBasis1D
    matrices: SystemMatrices1D
    lifting: Lifting1D
    lu: BandedLU

    @property
    def N(self) -> int:
        return self.basis.N


@lru_cache(maxsize=512)
def make_robin_config(N: int, alpha: complex, kappa: complex) -> RobinStepConfig:
    """Factor alpha^{-2} S + M once per (N, alpha, kappa)."""
    alpha = complex(alpha)
    kappa = complex(kappa)
    basis = build_basis(N, kappa)
    mats = assemble_system_1d(basis)
    lu = banded_lu(mats.helmholtz(alpha**-2))
    return RobinStepConfig(alpha, kappa, basis, mats, make_lifting(kappa), lu)


def robin_step(cfg: RobinStepConfig, f, B_minus, B_plus) -> np.ndarray:
    """Legendre coefficients of the solution.

    ``f`` may be a single coefficient vector (N+1,) or a batch (nb, N+1)
    with matching arrays ``B_minus``, ``B_plus`` of shape (nb,).
    """
    f = np.asarray(f, dtype=complex)
    N = cfg.N
    if f.shape[-1] != N + 1:
        raise ValueError(f"expected {N + 1} Legendre coefficients, got {f.shape[-1]}")
    single = f.ndim == 1
    F = np.atleast_2d(f).T.copy()  # (N+1, nb)
    Bm = np.broadcast_to(np.asarray(B_minus, dtype=complex), F.shape[1:])
    Bp = np.broadcast_to(np.asarray(B_plus, dtype=complex), F.shape[1:])
    # lifting chi = alpha (B_minus chi_minus - B_plus chi_plus) is degree one,
    # so (1 - alpha^{-2} d^2) chi = chi
    a = cfg.alpha
    lm, lp = cfg.lifting.chi_minus, cfg.lifting.chi_plus
    chi0 = a * (Bm * lm[0] - Bp * lp[0])
    chi1 = a * (Bm * lm[1] - Bp * lp[1])
    F[0] -= chi0
    F[1] -= chi1
    g = project_rhs(cfg.basis, F)
    w = banded_solve(cfg.lu, g)
    u = cfg.basis.to_legendre(w)
    u[0] += chi0
    u[1] += chi1
    return u[:, 0] if single else u.T

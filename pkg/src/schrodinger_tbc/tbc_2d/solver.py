"""Time marching of the free Schrödinger equation i u_t + Laplace u = 0 on a
rectangle with discrete transparent boundary conditions."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..rational_weights import Method
from ..spectral_core import (
    inverse_transform,
    inverse_transform_2d,
    legendre_transform_2d,
    lgl_grid,
)
from .domain import (
    CORNERS,
    HORIZONTAL,
    SEGMENTS,
    SIGN,
    VERTICAL,
    DomainMap,
    corner_operator,
    normal_robin_operator,
    traces_from_coeffs,
)
from .interior import InteriorSolver
from .schemes import BoundaryScheme, make_scheme, parse_scheme

SUPPORT_RATIO = 1e-10


class SupportWarning(UserWarning):
    """Initial datum is not negligible on the boundary."""


class NumericalBreakdown(RuntimeError):
    """The march produced non-finite or exploding values."""


@dataclass
class StepRecord:
    B: dict
    C: dict
    field: np.ndarray  # coefficients constrained by the Robin data (v for TR)


def grid_points(domain: DomainMap, N1: int, N2: int):
    g1, g2 = lgl_grid(N1), lgl_grid(N2)
    X1, X2 = domain.to_physical(g1.nodes[:, None], g2.nodes[None, :])
    return np.broadcast_to(X1, (N1 + 1, N2 + 1)), np.broadcast_to(X2, (N1 + 1, N2 + 1))


def check_support(samples: np.ndarray, ratio: float = SUPPORT_RATIO) -> float:
    """Largest boundary magnitude relative to the largest interior magnitude;
    warns when it reaches ``ratio``."""
    a = np.abs(samples)
    interior = a.max()
    if interior == 0:
        return 0.0
    edge = max(a[0].max(), a[-1].max(), a[:, 0].max(), a[:, -1].max())
    rel = float(edge / interior)
    if rel >= ratio:
        warnings.warn(
            f"initial datum is not effectively supported inside the domain "
            f"(boundary/interior magnitude ratio {rel:.2e})",
            SupportWarning,
            stacklevel=3,
        )
    return rel


class Solver2D:
    """u^j -> u^{j+1}: boundary step, lifted interior solve, diagonal update."""

    def __init__(
        self,
        scheme: str,
        domain: DomainMap,
        N1: int,
        N2: int,
        u0=None,
        M: int | None = None,
        capacity: int = 64,
    ):
        family, method = parse_scheme(scheme)
        if domain.method is not method:
            raise ValueError("domain one-step method and scheme disagree")
        self.scheme_name = scheme.lower()
        self.domain = domain
        self.N1, self.N2 = N1, N2
        self.bc: BoundaryScheme = make_scheme(scheme, domain, N1, N2, M=M, capacity=capacity)
        self.interior = InteriorSolver(
            N1, N2, domain.alpha1, domain.alpha2, self.bc.kappa1, self.bc.kappa2
        )
        if u0 is None:
            samples = np.zeros((N1 + 1, N2 + 1), complex)
        elif callable(u0):
            X1, X2 = grid_points(domain, N1, N2)
            samples = np.asarray(u0(X1, X2), dtype=complex)
        else:
            samples = np.asarray(u0, dtype=complex)
        if samples.shape != (N1 + 1, N2 + 1):
            raise ValueError(f"initial samples must have shape {(N1 + 1, N2 + 1)}")
        self.support_ratio = check_support(samples)
        self.U = legendre_transform_2d(samples)
        self.U0_norm = self.norm()
        self.j = 0
        self.last: StepRecord | None = None
        self.bc.start(traces_from_coeffs(self.U))

    @property
    def t(self) -> float:
        return self.j * self.domain.dt

    @property
    def staggered(self) -> bool:
        return self.domain.method is Method.TR

    def step(self) -> np.ndarray:
        self.bc.advance_aux()
        B, C = self.bc.histories()
        new = self.interior.solve(self.U, B, C)
        if self.staggered:
            U_next = 2.0 * new - self.U
        else:
            U_next = new
        if not np.all(np.isfinite(U_next)):
            raise NumericalBreakdown(f"non-finite field at step {self.j + 1}")
        self.bc.commit(traces_from_coeffs(U_next))
        self.last = StepRecord(B, C, new)
        self.U = U_next
        self.j += 1
        return self.U

    def run(self, n_steps: int, callback=None):
        for _ in range(n_steps):
            self.step()
            if callback is not None:
                callback(self)
        return self.U

    def samples(self) -> np.ndarray:
        return inverse_transform_2d(self.U)

    def norm(self, U=None) -> float:
        """L2 norm over the physical rectangle by LGL quadrature."""
        U = self.U if U is None else U
        g1, g2 = lgl_grid(self.N1), lgl_grid(self.N2)
        vals = inverse_transform_2d(U)
        w = np.outer(g1.weights, g2.weights) * self.domain.J1 * self.domain.J2
        return float(np.sqrt(np.sum(w * np.abs(vals) ** 2)))

    def boundary_residuals(self) -> dict:
        """Residuals of the discrete Robin and corner conditions of the last
        step, relative to the boundary size of the constrained field."""
        if self.last is None:
            raise RuntimeError("no step taken yet")
        return constraint_residuals(
            self.last.field,
            self.last.B,
            self.last.C,
            self.domain.alpha1,
            self.domain.alpha2,
            self.bc.kappa1,
            self.bc.kappa2,
        )


def constraint_residuals(V, B, C, alpha1, alpha2, kappa1, kappa2) -> dict:
    """Boundary L2 residual of each segment condition and each corner
    condition, divided by the boundary L2 size of the normal derivative
    data ('scale').  Norms use the LGL quadrature along the segment."""
    out = {}
    scale_parts = []
    for seg in SEGMENTS:
        s = SIGN[seg]
        if seg in VERTICAL:
            lhs = normal_robin_operator(V, seg, kappa1)
            rhs = -s * alpha1 * np.asarray(B[seg])
        else:
            lhs = normal_robin_operator(V, seg, kappa2)
            rhs = -s * alpha2 * np.asarray(B[seg])
        N = lhs.shape[0] - 1
        w = lgl_grid(N).weights
        res = inverse_transform(lhs - rhs)
        out[seg] = float(np.sqrt(np.sum(w * np.abs(res) ** 2)))
        scale_parts.append(float(np.sqrt(np.sum(w * np.abs(inverse_transform(lhs)) ** 2))))
    for c in CORNERS:
        s = SIGN[c[0]] * SIGN[c[1]]
        lhs = corner_operator(V, c, kappa1, kappa2)
        rhs = s * alpha1 * alpha2 * C[c]
        out[c] = abs(lhs - rhs)
        scale_parts.append(abs(lhs))
    out["scale"] = max(scale_parts) if scale_parts else 0.0
    return out


def boundary_neumann(bc: BoundaryScheme, traces: dict, B: dict) -> dict:
    """Outward normal derivatives (physical units) implied by the discrete
    Robin relations: d_n u = -(kappa u + alpha B)/J on each segment.

    ``traces`` holds the Dirichlet traces of the constrained field
    (u^{j+1}, or the staggered average for TR).  Returns Legendre
    coefficients per segment.
    """
    d = bc.domain
    out = {}
    for seg in SEGMENTS:
        J = d.J1 if seg in VERTICAL else d.J2
        out[seg] = -(bc.normal_kappa(seg) * np.asarray(traces[seg]) + bc.normal_alpha(seg) * np.asarray(B[seg])) / J
    return out


__all__ = [
    "Solver2D",
    "SupportWarning",
    "NumericalBreakdown",
    "StepRecord",
    "boundary_neumann",
    "constraint_residuals",
    "check_support",
    "grid_points",
    "HORIZONTAL",
]

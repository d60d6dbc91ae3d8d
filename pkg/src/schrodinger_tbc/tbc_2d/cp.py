"""Conventional Padé (CP) boundary maps, for DtN-map tests only.

The operator sqrt(d_t - i d_s^2) along each segment is replaced by the
partial fractions of R_M, giving M driven 1D Schrödinger fields per segment

    (d_t - i d_s^2 + eta_k^2) phi_k = u,        phi_k(., 0) = 0,

and the outward Neumann datum  d_n u = -e^{-i pi/4} (b_0 u - sum_k b_k phi_k).

The fields are closed at the segment ends by the 1D transparent condition
for the shifted symbol sqrt(z + eta_k^2), discretized with shifted
convolution-quadrature weights.  That closure ignores the field beyond the
corner, which is the known weakness of this approach.
"""

from __future__ import annotations

import numpy as np

from ..boundary_1d import endpoint_values, make_robin_config, robin_step
from ..rational_weights import Method, pade, shifted_cq_weights
from .domain import SEGMENTS, VERTICAL, DomainMap

_ROT = np.exp(-0.25j * np.pi)


class CpScheme:
    family = "CP"

    def __init__(self, domain: DomainMap, N1: int, N2: int, M: int, capacity: int = 64):
        if M < 1:
            raise ValueError("CP schemes need a Padé order M >= 1")
        self.domain = domain
        self.method = domain.method
        self.N1, self.N2 = N1, N2
        self.M = int(M)
        self.pade = pade(self.M)
        self.rho = domain.rho
        self.eta_bar2 = self.pade.etak**2 / self.rho
        self._cap = max(int(capacity), 2)
        self._weights = None
        self.phi = {a: np.zeros((self.M, self._seg_len(a)), complex) for a in SEGMENTS}
        # endpoint values (k, end, time), end 0 is y = -1
        self.ends = {a: np.zeros((self.M, 2, self._cap), complex) for a in SEGMENTS}
        self.j = 0

    @property
    def staggered(self) -> bool:
        return self.method is Method.TR

    @property
    def label(self) -> str:
        return f"cp-{self.method.value.lower()}"

    def _seg_len(self, seg: str) -> int:
        return (self.N2 if seg in VERTICAL else self.N1) + 1

    def _along(self, seg: str):
        """(N, alpha, J) of the coordinate running along a segment."""
        d = self.domain
        if seg in VERTICAL:
            return self.N2, d.alpha2, d.J2
        return self.N1, d.alpha1, d.J1

    def _ensure(self, n: int) -> None:
        if self._weights is None or n >= self._cap:
            cap = max(n + 1, 2 * self._cap) if self._weights is not None else self._cap
            for a, arr in self.ends.items():
                new = np.zeros((self.M, 2, cap), complex)
                new[:, :, : self._cap] = arr
                self.ends[a] = new
            self._cap = cap
            self._weights = np.array(
                [shifted_cq_weights(self.method, eta, self.domain.dt, cap) for eta in self.pade.etak]
            )

    def start(self, traces: dict) -> None:
        self.j = 0
        self._ensure(1)

    def _history(self, seg: str, n: int) -> np.ndarray:
        """sum_{m=1}^{n} w_{k,m} phi_k^{n-m} at both ends, shape (M, 2)."""
        if n <= 0:
            return np.zeros((self.M, 2), complex)
        W = self._weights[:, 1 : n + 1]
        E = self.ends[seg][:, :, n - 1 :: -1] if n > 1 else self.ends[seg][:, :, :1]
        return np.einsum("km,kem->ke", W, E)

    def step(self, traces_new: dict, traces_old: dict) -> dict:
        """Advance the segment fields to t_{j+1} given the Dirichlet traces
        (Legendre coefficients) at t_j and t_{j+1}; returns the outward
        Neumann data (physical units, Legendre coefficients) at t_{j+1},
        or at the midpoint sample for the trapezoidal variant."""
        j = self.j
        self._ensure(j + 2)
        tr = self.staggered
        out = {}
        p = self.pade
        for a in SEGMENTS:
            N, alpha, J = self._along(a)
            src = 0.5 * (traces_new[a] + traces_old[a]) if tr else np.asarray(traces_new[a])
            H = self._history(a, j + 1)
            if tr:
                H = 0.5 * (H + self._history(a, j))
            v = np.empty_like(self.phi[a])
            for k in range(self.M):
                g = 1.0 + self.eta_bar2[k]
                a_eff = alpha * np.sqrt(g)
                cfg = make_robin_config(N, a_eff, a_eff)
                rhs = (self.phi[a][k] + src / self.rho) / g
                scale = J * _ROT / a_eff
                v[k] = robin_step(cfg, rhs, scale * H[k, 0], scale * H[k, 1])
            new = 2.0 * v - self.phi[a] if tr else v
            vm, vp = endpoint_values(new.T)
            self.ends[a][:, 0, j + 1] = vm
            self.ends[a][:, 1, j + 1] = vp
            self.phi[a] = new
            out[a] = -_ROT * (p.b0 * src - p.bk @ v)
        self.j = j + 1
        return out

    def storage(self) -> int:
        return sum(v.size for v in self.phi.values()) + 8 * self.M * (self.j + 1)

"""Boundary state machines for the discrete transparent conditions.

Each scheme follows one protocol per time step:

    advance_aux()   move the segment auxiliary fields off the diagonal
    histories()     segment history functions B_a (Legendre coefficients)
                    and corner scalars C_{a1a2}
    commit(traces)  diagonal update from the traces of the new interior field

The Robin data consumed by the interior solve are

    (d_1 + s1 kappa1) u = -s1 alpha1 B_{a1}        on vertical segments
    (d_2 + s2 kappa2) u = -s2 alpha2 B_{a2}        on horizontal segments
    (d_2 + s2 kappa2)(d_1 + s1 kappa1) u = s1 s2 alpha1 alpha2 C_{a1a2}

with kappa = alpha (CQ) or alpha * varpi (NP).  For the trapezoidal
variants these hold for the staggered field v^{j+1} = (u^{j+1} + u^j)/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..boundary_1d import endpoint_values, make_robin_config, robin_step
from ..rational_weights import Method, cq_weights, np_params
from .domain import CORNERS, HORIZONTAL, SIGN, VERTICAL, DomainMap, corner_values

SCHEMES = ("cq-bdf1", "cq-tr", "np-bdf1", "np-tr")


def parse_scheme(name: str) -> tuple[str, Method]:
    key = str(name).lower()
    if key not in SCHEMES:
        raise ValueError(f"unknown scheme {name!r}; choose from {', '.join(SCHEMES)}")
    family, method = key.split("-")
    return family, Method.parse(method)


def _end(v, s: int):
    """Value at y = s of Legendre coefficients along the last axis."""
    vm, vp = endpoint_values(np.moveaxis(np.asarray(v), -1, 0))
    return vp if s > 0 else vm


@dataclass
class WorkCounters:
    """Multiply-add counts of the history accumulations of the last step,
    plus the number of stored auxiliary complex values."""

    segment_history: int = 0
    corner_history: int = 0
    storage: int = 0
    per_step: list = field(default_factory=list, repr=False)

    def record(self, seg: int, cor: int, storage: int) -> None:
        self.segment_history = seg
        self.corner_history = cor
        self.storage = storage
        self.per_step.append((seg, cor, storage))

    @property
    def history_total(self) -> int:
        return self.segment_history + self.corner_history


class BoundaryScheme:
    family = ""

    def __init__(self, domain: DomainMap, N1: int, N2: int):
        self.domain = domain
        self.method = domain.method
        self.N1, self.N2 = N1, N2
        self.rho = domain.rho
        self.alpha1, self.alpha2 = domain.alpha1, domain.alpha2
        self.j = 0
        self.counters = WorkCounters()

    @property
    def staggered(self) -> bool:
        return self.method is Method.TR

    @property
    def label(self) -> str:
        return f"{self.family}-{self.method.value}"

    def seg_config(self, seg: str):
        if seg in VERTICAL:
            return make_robin_config(self.N2, self.alpha2, self.kappa2)
        return make_robin_config(self.N1, self.alpha1, self.kappa1)

    def normal_kappa(self, seg: str) -> complex:
        return self.kappa1 if seg in VERTICAL else self.kappa2

    def normal_alpha(self, seg: str) -> complex:
        return self.alpha1 if seg in VERTICAL else self.alpha2


# --------------------------------------------------------------------------
# convolution quadrature


class CqScheme(BoundaryScheme):
    """Convolution-quadrature realization with two-time auxiliary fields.

    Vertical segment a1 keeps the front phi_{a1}^{m,j}, m = 0..j (rows of a
    ragged array); horizontal segment a2 keeps phi_{a2}^{j,q}, q = 0..j.
    Older wedge columns are never read again, so only the front is kept.
    Corner arrays Phi_{a1a2}[tau1, tau2] hold endpoint values: above the
    diagonal from the vertical segment, below it from the horizontal one,
    on it from the interior field.
    """

    family = "CQ"

    def __init__(self, domain: DomainMap, N1: int, N2: int, capacity: int = 64):
        super().__init__(domain, N1, N2)
        self.kappa1, self.kappa2 = self.alpha1, self.alpha2
        self._cap = max(int(capacity), 2)
        self.front = {a: np.zeros((self._cap, self._seg_len(a)), complex) for a in VERTICAL + HORIZONTAL}
        self.corner = {c: np.zeros((self._cap, self._cap), complex) for c in CORNERS}
        self._prev_B = None
        self._prev_C = None
        self._pending = None

    def _seg_len(self, seg: str) -> int:
        return (self.N2 if seg in VERTICAL else self.N1) + 1

    def _ensure(self, n: int) -> None:
        if n <= self._cap:
            return
        cap = max(n, 2 * self._cap)
        for a, arr in self.front.items():
            new = np.zeros((cap, arr.shape[1]), complex)
            new[: self._cap] = arr
            self.front[a] = new
        for c, arr in self.corner.items():
            new = np.zeros((cap, cap), complex)
            new[: self._cap, : self._cap] = arr
            self.corner[c] = new
        self._cap = cap

    def weights(self, n: int) -> np.ndarray:
        return cq_weights(self.method, n).omega

    def start(self, traces: dict) -> None:
        self.j = 0
        for a in VERTICAL + HORIZONTAL:
            self.front[a][0] = traces[a]
        for c, val in corner_values(traces).items():
            self.corner[c][0, 0] = val
        self._prev_B = {a: np.zeros(self._seg_len(a), complex) for a in VERTICAL + HORIZONTAL}
        self._prev_C = {c: 0j for c in CORNERS}

    def _rev(self, n: int) -> np.ndarray:
        """(omega_n, ..., omega_1): sum_{k=1}^n omega_k X[n-k] = rev @ X[:n]."""
        w = self.weights(n)
        return w[n:0:-1]

    def advance_aux(self) -> None:
        j = self.j
        self._ensure(j + 2)
        r1 = self._rev(j + 1)
        r0 = self._rev(j) if j > 0 else None
        tr = self.staggered
        # vertical fronts: rows m = 0..j, tau2: j -> j+1
        for a1 in VERTICAL:
            hist = {}
            for a2 in HORIZONTAL:
                Phi = self.corner[a1 + a2]
                h = Phi[: j + 1, : j + 1] @ r1
                if tr:
                    h0 = Phi[: j + 1, :j] @ r0 if j > 0 else 0.0
                    h = 0.5 * (h + h0)
                hist[a2] = h
            old = self.front[a1][: j + 1]
            new = robin_step(self.seg_config(a1), old, hist["b"], hist["t"])
            if tr:
                new = 2.0 * new - old
            self.front[a1][: j + 1] = new
            vm, vp = endpoint_values(new.T)
            self.corner[a1 + "b"][: j + 1, j + 1] = vm
            self.corner[a1 + "t"][: j + 1, j + 1] = vp
        # horizontal fronts: columns q = 0..j, tau1: j -> j+1
        for a2 in HORIZONTAL:
            hist = {}
            for a1 in VERTICAL:
                Phi = self.corner[a1 + a2]
                h = r1 @ Phi[: j + 1, : j + 1]
                if tr:
                    h0 = r0 @ Phi[:j, : j + 1] if j > 0 else 0.0
                    h = 0.5 * (h + h0)
                hist[a1] = h
            old = self.front[a2][: j + 1]
            new = robin_step(self.seg_config(a2), old, hist["l"], hist["r"])
            if tr:
                new = 2.0 * new - old
            self.front[a2][: j + 1] = new
            vm, vp = endpoint_values(new.T)
            self.corner["l" + a2][j + 1, : j + 1] = vm
            self.corner["r" + a2][j + 1, : j + 1] = vp
        self._pending = None

    def _full_histories(self):
        j = self.j
        r1 = self._rev(j + 1)
        B = {a: r1 @ self.front[a][: j + 1] for a in VERTICAL + HORIZONTAL}
        C = {}
        for c in CORNERS:
            Phi = self.corner[c]
            # tau1 = j+1-k (rows), tau2 = j+1-k' (columns), k, k' >= 1
            C[c] = complex(r1 @ Phi[: j + 1, : j + 1] @ r1)
        return B, C

    def histories(self):
        if self._pending is None:
            self._pending = self._full_histories()
        B, C = self._pending
        j = self.j
        n = j + 1
        n_nodes = max(self.N1, self.N2) + 1
        self.counters.record(4 * n * n_nodes, 4 * n * n, self.storage())
        if not self.staggered:
            return B, C
        Bh = {a: 0.5 * (B[a] + self._prev_B[a]) for a in B}
        Ch = {c: 0.5 * (C[c] + self._prev_C[c]) for c in C}
        return Bh, Ch

    def commit(self, traces: dict) -> None:
        if self._pending is None:
            self._pending = self._full_histories()
        B, C = self._pending
        self._prev_B, self._prev_C = B, C
        j1 = self.j + 1
        for a in VERTICAL + HORIZONTAL:
            self.front[a][j1] = traces[a]
        for c, val in corner_values(traces).items():
            self.corner[c][j1, j1] = val
        self.j = j1
        self._pending = None

    def storage(self) -> int:
        n = self.j + 1
        seg = sum(n * self._seg_len(a) for a in VERTICAL + HORIZONTAL)
        return seg + 4 * n * n


# --------------------------------------------------------------------------
# effectively local Padé realization


class NpScheme(BoundaryScheme):
    """Padé realization: M resolvent fields per segment, M x M per corner.

    phi[a] has shape (M, N+1): the diagonal values phi_{k,a}^{j,j}.
    psi[c][k, k'] = psi_{k,k',a1,a2}^{j,j}; the mirrored orientation
    psi_{k',k,a2,a1} is its transpose and is not stored separately.
    """

    family = "NP"

    def __init__(self, domain: DomainMap, N1: int, N2: int, M: int):
        super().__init__(domain, N1, N2)
        if M < 1:
            raise ValueError("NP schemes need a Padé order M >= 1")
        self.M = int(M)
        self.params = np_params(self.M, self.rho)
        w = self.params.varpi
        self.kappa1, self.kappa2 = self.alpha1 * w, self.alpha2 * w
        self.phi = {a: np.zeros((self.M, self._seg_len(a)), complex) for a in VERTICAL + HORIZONTAL}
        self.psi = {c: np.zeros((self.M, self.M), complex) for c in CORNERS}
        self.off = None
        self.plain = None
        self.u_prev = None
        self.psi_asymmetry = 0.0
        self.psi_asymmetry_max = 0.0

    def _seg_len(self, seg: str) -> int:
        return (self.N2 if seg in VERTICAL else self.N1) + 1

    def psi_view(self, a: str, b: str) -> np.ndarray:
        """psi_{k,k',a,b}: read path for either orientation of a corner."""
        if a in VERTICAL:
            return self.psi[a + b]
        return self.psi[b + a].T

    def start(self, traces: dict) -> None:
        self.j = 0
        self.u_prev = {a: np.array(traces[a], complex) for a in traces}

    def _aux_data(self, a: str):
        """Endpoint histories sum_k' Gamma_k' psi_{k,k',a,.} for both ends."""
        G = self.params.Gamma
        if a in VERTICAL:
            return self.psi_view(a, "b") @ G, self.psi_view(a, "t") @ G
        return self.psi_view(a, "l") @ G, self.psi_view(a, "r") @ G

    def _plain_data(self, a: str):
        """Endpoint histories of the plain field: sum_k Gamma_k phi_{k,other}(y_a)."""
        G = self.params.Gamma
        s = SIGN[a]
        if a in VERTICAL:
            return G @ _end(self.phi["b"], s), G @ _end(self.phi["t"], s)
        return G @ _end(self.phi["l"], s), G @ _end(self.phi["r"], s)

    def advance_aux(self) -> None:
        tr = self.staggered
        off = {}
        for a in VERTICAL + HORIZONTAL:
            cfg = self.seg_config(a)
            Bm, Bp = self._aux_data(a)
            new = robin_step(cfg, self.phi[a], Bm, Bp)
            off[a] = 2.0 * new - self.phi[a] if tr else new
        self.off = off
        if tr:
            plain = {}
            for a in VERTICAL + HORIZONTAL:
                cfg = self.seg_config(a)
                Bm, Bp = self._plain_data(a)
                half = robin_step(cfg, self.u_prev[a], Bm, Bp)
                plain[a] = 2.0 * half - self.u_prev[a]
            self.plain = plain

    def histories(self):
        p = self.params
        G = p.Gamma
        B, C = {}, {}
        if not self.staggered:
            for a in VERTICAL + HORIZONTAL:
                B[a] = G @ self.off[a]
            for c in CORNERS:
                C[c] = complex(G @ self.psi[c] @ G)
        else:
            P = p.tr_factor
            bb = p.b_bar
            sigma = -G.sum() / p.rho  # = b_bar0 - varpi
            for a in VERTICAL + HORIZONTAL:
                B[a] = (
                    -0.5 * (bb * P) @ self.off[a]
                    - 0.5 * bb @ self.phi[a]
                    + 0.5 * (G.sum() / p.rho) * (self.plain[a] - self.u_prev[a])
                )
            wgt = bb * p.eta_bar**2 * p.damping
            ucorn = corner_values(self.u_prev)
            for c in CORNERS:
                a1, a2 = c[0], c[1]
                K = np.outer(bb, bb) * (np.outer(P, P) + 1.0)
                edge = _end(self.phi[a1], SIGN[a2]) + _end(self.phi[a2], SIGN[a1])
                C[c] = complex(
                    0.5 * np.sum(K * self.psi[c]) - sigma * (wgt @ edge) + sigma**2 * ucorn[c]
                )
        n_nodes = max(self.N1, self.N2) + 1
        self.counters.record(4 * self.M * n_nodes, 4 * self.M * self.M, self.storage())
        return B, C

    def commit(self, traces: dict) -> None:
        p = self.params
        rho = p.rho
        d = p.damping
        new_phi = {}
        if not self.staggered:
            for a in VERTICAL + HORIZONTAL:
                new_phi[a] = d[:, None] * (self.off[a] + traces[a][None, :] / rho)
            for c in CORNERS:
                a1, a2 = c[0], c[1]
                ev = _end(self.off[a1], SIGN[a2])  # phi_{k,a1}^{j,j+1}(y_{a2})
                eh = _end(self.off[a2], SIGN[a1])  # phi_{k',a2}^{j+1,j}(y_{a1})
                # vertical-first: tau2 then tau1
                step = (self.psi[c] + ev[:, None] / rho) * d[None, :]
                nv = d[:, None] * (step + _end(new_phi[a2], SIGN[a1])[None, :] / rho)
                # horizontal-first: tau1 then tau2
                step = d[:, None] * (self.psi[c] + eh[None, :] / rho)
                nh = (step + _end(new_phi[a1], SIGN[a2])[:, None] / rho) * d[None, :]
                self._track_asymmetry(nv, nh)
                self.psi[c] = nv
        else:
            P = p.tr_factor
            q = d / rho
            for a in VERTICAL + HORIZONTAL:
                new_phi[a] = P[:, None] * self.off[a] + q[:, None] * (traces[a] + self.plain[a])[None, :]
            for c in CORNERS:
                a1, a2 = c[0], c[1]
                s1, s2 = SIGN[a1], SIGN[a2]
                psi = self.psi[c]
                # vertical-first path
                half_v = _end(self.off[a1], s2) + _end(self.phi[a1], s2)
                step = P[None, :] * psi + q[None, :] * half_v[:, None]
                # phi_{k',a2}^{j,j+1}(y_{a1}) from the tau2 resolvent ODE at the corner
                up = P * _end(self.phi[a2], s1) + q * (
                    _end(self.plain[a1], s2) + _end(self.u_prev[a1], s2)
                )
                nv = P[:, None] * step + q[:, None] * (_end(new_phi[a2], s1) + up)[None, :]
                # horizontal-first path
                half_h = _end(self.off[a2], s1) + _end(self.phi[a2], s1)
                step = P[:, None] * psi + q[:, None] * half_h[None, :]
                right = P * _end(self.phi[a1], s2) + q * (
                    _end(self.plain[a2], s1) + _end(self.u_prev[a2], s1)
                )
                nh = step * P[None, :] + q[None, :] * (_end(new_phi[a1], s2) + right)[:, None]
                self._track_asymmetry(nv, nh)
                self.psi[c] = nv
        self.phi = new_phi
        self.u_prev = {a: np.array(traces[a], complex) for a in traces}
        self.off = None
        self.plain = None
        self.j += 1

    def _track_asymmetry(self, a: np.ndarray, b: np.ndarray) -> None:
        # absolute gap between the two update orders (tau1 first vs tau2 first)
        err = float(np.max(np.abs(a - b)))
        self.psi_asymmetry = err
        self.psi_asymmetry_max = max(self.psi_asymmetry_max, err)

    def storage(self) -> int:
        return sum(v.size for v in self.phi.values()) + sum(v.size for v in self.psi.values())


def make_scheme(name: str, domain: DomainMap, N1: int, N2: int, M: int | None = None, capacity: int = 64):
    family, method = parse_scheme(name)
    if method is not domain.method:
        raise ValueError(f"scheme {name} does not match the domain's one-step method")
    if family == "cq":
        return CqScheme(domain, N1, N2, capacity=capacity)
    if M is None:
        raise ValueError("NP schemes require the Padé order M")
    return NpScheme(domain, N1, N2, M)

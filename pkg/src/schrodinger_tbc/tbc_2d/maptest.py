"""DtN-map test: drive a boundary scheme with exact Dirichlet traces and
compare the Neumann data it implies against the exact normal derivative."""

from __future__ import annotations

import numpy as np

from ..rational_weights import Method
from ..spectral_core import inverse_transform, legendre_transform, lgl_grid
from .cp import CpScheme
from .domain import SEGMENTS, VERTICAL, DomainMap
from .schemes import make_scheme
from .solver import boundary_neumann

MAP_SCHEMES = ("cq-bdf1", "cq-tr", "np-bdf1", "np-tr", "cp-bdf1", "cp-tr")


def parse_map_scheme(name: str):
    key = str(name).lower()
    if key not in MAP_SCHEMES:
        raise ValueError(f"unknown map-test scheme {name!r}; choose from {', '.join(MAP_SCHEMES)}")
    family, method = key.split("-")
    return family, method


class MapTester:
    """``dirichlet(x1, x2, t)`` gives the exact field and
    ``neumann(seg, x1, x2, t)`` its outward normal derivative."""

    def __init__(self, scheme: str, domain: DomainMap, N1: int, N2: int, dirichlet, neumann, M=None, capacity=64):
        family, method = parse_map_scheme(scheme)
        if Method.parse(method) is not domain.method:
            raise ValueError("domain one-step method and scheme disagree")
        self.domain = domain
        self.N1, self.N2 = N1, N2
        self.dirichlet = dirichlet
        self.neumann_exact = neumann
        if family == "cp":
            if M is None:
                raise ValueError("CP schemes require the Padé order M")
            self.bc = CpScheme(domain, N1, N2, M, capacity=capacity)
        else:
            self.bc = make_scheme(scheme, domain, N1, N2, M=M, capacity=capacity)
        self.family = family
        self._nodes = {}
        for seg in SEGMENTS:
            N = N2 if seg in VERTICAL else N1
            g = lgl_grid(N)
            x1, x2 = domain.segment_points(seg, g.nodes)
            self._nodes[seg] = (x1, x2, g.weights, domain.segment_jacobian(seg))
        self.j = 0
        self.traces = self._traces(0.0)
        self.bc.start(self.traces)

    @property
    def t(self) -> float:
        return self.j * self.domain.dt

    def _traces(self, t: float) -> dict:
        return {
            seg: legendre_transform(np.asarray(self.dirichlet(x1, x2, t), dtype=complex))
            for seg, (x1, x2, _, _) in self._nodes.items()
        }

    def _exact_neumann(self, t: float) -> dict:
        return {
            seg: np.asarray(self.neumann_exact(seg, x1, x2, t), dtype=complex)
            for seg, (x1, x2, _, _) in self._nodes.items()
        }

    def step(self) -> float:
        """One step; returns e(t_{j+1}), the boundary L2 misfit of the
        Neumann data (for TR: staggered samples against the average of the
        exact data at t_j and t_{j+1})."""
        dt = self.domain.dt
        t_new = (self.j + 1) * dt
        new = self._traces(t_new)
        tr = self.domain.staggered
        if self.family == "cp":
            num = self.bc.step(new, self.traces)
        else:
            self.bc.advance_aux()
            B, _ = self.bc.histories()
            constrained = {a: 0.5 * (new[a] + self.traces[a]) for a in new} if tr else new
            num = boundary_neumann(self.bc, constrained, B)
            self.bc.commit(new)
        exact = self._exact_neumann(t_new)
        if tr:
            prev = self._exact_neumann(t_new - dt)
            exact = {a: 0.5 * (exact[a] + prev[a]) for a in exact}
        total = 0.0
        for seg, (_, _, w, J) in self._nodes.items():
            diff = inverse_transform(num[seg]) - exact[seg]
            total += J * float(np.sum(w * np.abs(diff) ** 2))
        self.traces = new
        self.j += 1
        return float(np.sqrt(total))


__all__ = ["MAP_SCHEMES", "MapTester", "parse_map_scheme"]

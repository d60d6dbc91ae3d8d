"""Rectangle-to-reference map, boundary labels and trace helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rational_weights import Method, rho_for

# vertical segments carry functions of y2, horizontal ones functions of y1
VERTICAL = ("l", "r")
HORIZONTAL = ("b", "t")
SEGMENTS = ("l", "r", "b", "t")
CORNERS = ("lb", "lt", "rb", "rt")
SIGN = {"l": -1, "r": 1, "b": -1, "t": 1}


def corner_key(a1: str, a2: str) -> str:
    return a1 + a2


@dataclass(frozen=True)
class DomainMap:
    x_l: float
    x_r: float
    x_b: float
    x_t: float
    dt: float
    method: Method

    def __post_init__(self):
        if not (self.x_l < self.x_r and self.x_b < self.x_t):
            raise ValueError(
                f"invalid rectangle ({self.x_l},{self.x_r})x({self.x_b},{self.x_t})"
            )
        if not self.dt > 0:
            raise ValueError("time step must be positive")
        object.__setattr__(self, "method", Method.parse(self.method))

    @classmethod
    def from_bounds(cls, bounds, dt: float, method) -> "DomainMap":
        xl, xr, xb, xt = (float(v) for v in bounds)
        return cls(xl, xr, xb, xt, float(dt), Method.parse(method))

    @property
    def J1(self) -> float:
        return 0.5 * (self.x_r - self.x_l)

    @property
    def J2(self) -> float:
        return 0.5 * (self.x_t - self.x_b)

    @property
    def xbar1(self) -> float:
        return 0.5 * (self.x_r + self.x_l)

    @property
    def xbar2(self) -> float:
        return 0.5 * (self.x_t + self.x_b)

    @property
    def beta1(self) -> float:
        return self.J1**-2

    @property
    def beta2(self) -> float:
        return self.J2**-2

    @property
    def rho(self) -> float:
        return rho_for(self.method, self.dt)

    @property
    def alpha1(self) -> complex:
        return complex(np.sqrt(self.rho / self.beta1) * np.exp(-0.25j * np.pi))

    @property
    def alpha2(self) -> complex:
        return complex(np.sqrt(self.rho / self.beta2) * np.exp(-0.25j * np.pi))

    @property
    def staggered(self) -> bool:
        return self.method is Method.TR

    def to_physical(self, y1, y2):
        return self.J1 * np.asarray(y1) + self.xbar1, self.J2 * np.asarray(y2) + self.xbar2

    def segment_jacobian(self, seg: str) -> float:
        return self.J2 if seg in VERTICAL else self.J1

    def segment_points(self, seg: str, y):
        """Physical coordinates of reference abscissae ``y`` on a segment."""
        y = np.asarray(y, dtype=float)
        if seg in VERTICAL:
            x1 = np.full_like(y, self.x_r if seg == "r" else self.x_l)
            x2 = self.J2 * y + self.xbar2
        else:
            x1 = self.J1 * y + self.xbar1
            x2 = np.full_like(y, self.x_t if seg == "t" else self.x_b)
        return x1, x2

    def corner_point(self, corner: str):
        return (
            self.x_r if corner[0] == "r" else self.x_l,
            self.x_t if corner[1] == "t" else self.x_b,
        )


def _end_vector(n: int, s: int) -> np.ndarray:
    return float(s) ** np.arange(n)


def _deriv_end_vector(n: int, s: int) -> np.ndarray:
    k = np.arange(n)
    return float(s) ** (k + 1) * 0.5 * k * (k + 1)


def traces_from_coeffs(U) -> dict:
    """Legendre coefficients of the four boundary traces of a 2D field."""
    U = np.asarray(U)
    e1m, e1p = _end_vector(U.shape[0], -1), _end_vector(U.shape[0], 1)
    e2m, e2p = _end_vector(U.shape[1], -1), _end_vector(U.shape[1], 1)
    return {"l": e1m @ U, "r": e1p @ U, "b": U @ e2m, "t": U @ e2p}


def corner_values(traces: dict) -> dict:
    """Corner values read from the vertical traces."""
    out = {}
    for a1 in VERTICAL:
        v = traces[a1]
        for a2 in HORIZONTAL:
            out[a1 + a2] = complex(_end_vector(v.shape[0], SIGN[a2]) @ v)
    return out


def normal_robin_operator(U, seg: str, kappa: complex) -> np.ndarray:
    """Coefficients of (d_1 + s kappa) u on a vertical segment, or
    (d_2 + s kappa) u on a horizontal one, with s the segment sign.

    The discrete Robin condition reads: this equals -s alpha B.
    """
    U = np.asarray(U)
    s = SIGN[seg]
    if seg in VERTICAL:
        op = _deriv_end_vector(U.shape[0], s) + s * kappa * _end_vector(U.shape[0], s)
        return op @ U
    op = _deriv_end_vector(U.shape[1], s) + s * kappa * _end_vector(U.shape[1], s)
    return U @ op


def corner_operator(U, corner: str, kappa1: complex, kappa2: complex) -> complex:
    """(d_2 + s2 kappa2)(d_1 + s1 kappa1) u at a corner."""
    U = np.asarray(U)
    s1, s2 = SIGN[corner[0]], SIGN[corner[1]]
    o1 = _deriv_end_vector(U.shape[0], s1) + s1 * kappa1 * _end_vector(U.shape[0], s1)
    o2 = _deriv_end_vector(U.shape[1], s2) + s2 * kappa2 * _end_vector(U.shape[1], s2)
    return complex(o1 @ U @ o2)

"""Convolution-quadrature weights of the half-order derivative, the diagonal
Padé approximant of sqrt(z), and the Padé data rescaled for a time step."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

__all__ = [
    "Method",
    "WeightTable",
    "PadeApprox",
    "NpParams",
    "cq_weights",
    "pade",
    "pade_eval",
    "pade_eval_direct",
    "np_params",
    "shifted_cq_weights",
    "rho_for",
]


class Method(str, Enum):
    BDF1 = "BDF1"
    TR = "TR"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown one-step method {value!r}; use BDF1 or TR") from None


def rho_for(method, dt: float) -> float:
    """Symbol scale of the one-step method: 1/dt (BDF1) or 2/dt (TR)."""
    m = Method.parse(method)
    return (1.0 if m is Method.BDF1 else 2.0) / dt


@dataclass(frozen=True)
class WeightTable:
    method: Method
    n: int
    omega: np.ndarray


@lru_cache(maxsize=32)
def _cq_weights_cached(method: Method, n: int) -> np.ndarray:
    w = np.empty(n + 1)
    w[0] = 1.0
    if method is Method.BDF1:
        for j in range(1, n + 1):
            w[j] = ((j - 1.5) / j) * w[j - 1]
    else:
        if n >= 1:
            w[1] = -1.0
        for j in range(1, n):
            w[j + 1] = ((j - 1) * w[j - 1] - w[j]) / (j + 1)
    w.setflags(write=False)
    return w


def cq_weights(method, n: int) -> WeightTable:
    """Taylor coefficients of sqrt(delta(zeta)) / sqrt(rho) for BDF1 or TR."""
    if n < 0:
        raise ValueError("n must be non-negative")
    m = Method.parse(method)
    return WeightTable(m, n, _cq_weights_cached(m, n))


@dataclass(frozen=True)
class PadeApprox:
    M: int
    b0: float
    bk: np.ndarray
    etak: np.ndarray


@lru_cache(maxsize=32)
def pade(M: int) -> PadeApprox:
    """R_M(z) = b0 - sum_k b_k / (z + eta_k^2), exact at z = 1."""
    if M < 1:
        raise ValueError("Padé order must be >= 1")
    k = np.arange(1, M + 1)
    # tan(k pi/(2M+1)) through the cotangent of the complementary angle,
    # which stays accurate as the angle approaches pi/2.
    eta = 1.0 / np.tan(np.pi * (2 * M + 1 - 2 * k) / (2 * (2 * M + 1)))
    bk = 2.0 * eta**2 * (1.0 + eta**2) / (2 * M + 1)
    eta.setflags(write=False)
    bk.setflags(write=False)
    return PadeApprox(M, float(2 * M + 1), bk, eta)


def pade_eval(p: PadeApprox, z):
    """Evaluate R_M(z).

    Uses sum_k eta_k^2 = M(2M+1) to rewrite the partial fractions as
    R_M(z) = 1 + (z - 1) (2/(2M+1)) sum_k eta_k^2/(z + eta_k^2),
    which avoids cancelling large terms against b_0.
    """
    z = np.asarray(z, dtype=complex)
    e2 = p.etak**2
    den = z[..., None] + e2
    if np.any(den == 0):
        raise ValueError("Padé approximant evaluated at a pole")
    out = 1.0 + (z - 1.0) * (2.0 / (2 * p.M + 1)) * np.sum(e2 / den, axis=-1)
    return out if out.ndim else complex(out)


def pade_eval_direct(p: PadeApprox, z):
    """Plain partial-fraction evaluation b_0 - sum_k b_k/(z + eta_k^2)."""
    z = np.asarray(z, dtype=complex)
    den = z[..., None] + p.etak**2
    if np.any(den == 0):
        raise ValueError("Padé approximant evaluated at a pole")
    out = p.b0 - np.sum(p.bk / den, axis=-1)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class NpParams:
    M: int
    rho: float
    eta_bar: np.ndarray
    b_bar0: float
    b_bar: np.ndarray
    Gamma: np.ndarray
    varpi: float

    @property
    def damping(self) -> np.ndarray:
        """1/(1 + eta_bar^2): one backward-Euler step of the resolvent ODEs."""
        return 1.0 / (1.0 + self.eta_bar**2)

    @property
    def tr_factor(self) -> np.ndarray:
        """(1 - eta_bar^2)/(1 + eta_bar^2): trapezoidal amplification."""
        return (1.0 - self.eta_bar**2) / (1.0 + self.eta_bar**2)


def np_params(M: int, rho: float) -> NpParams:
    if rho <= 0:
        raise ValueError("rho must be positive")
    p = pade(M)
    s = np.sqrt(rho)
    eta_bar = p.etak / s
    b_bar = p.bk / s
    b_bar0 = p.b0 / s
    Gamma = -b_bar / (1.0 + eta_bar**2)
    varpi = float(b_bar0 + math.fsum(Gamma) / rho)
    return NpParams(M, float(rho), eta_bar, float(b_bar0), b_bar, Gamma, varpi)


def _series_sqrt(c: np.ndarray, n: int) -> np.ndarray:
    """Taylor coefficients of sqrt(f) given those of f (c[0] > 0), by the
    recurrence 2 s_0 s_m = c_m - sum_{i=1}^{m-1} s_i s_{m-i}."""
    s = np.zeros(n + 1)
    s[0] = np.sqrt(c[0])
    for m in range(1, n + 1):
        acc = c[m] - np.dot(s[1:m], s[m - 1 : 0 : -1])
        s[m] = acc / (2.0 * s[0])
    return s


@lru_cache(maxsize=256)
def _shifted_cached(method: Method, eta: float, dt: float, n: int) -> np.ndarray:
    c = np.zeros(n + 1)
    if method is Method.BDF1:
        c[0] = 1.0 / dt
        if n >= 1:
            c[1] = -1.0 / dt
    else:
        # 2(1 - z)/(1 + z) = 2 (1 - 2z + 2z^2 - 2z^3 + ...)
        c[0] = 2.0 / dt
        c[1:] = 2.0 / dt * 2.0 * (-1.0) ** np.arange(1, n + 1)
    c[0] += eta**2
    s = _series_sqrt(c, n)
    s.setflags(write=False)
    return s


def shifted_cq_weights(method, eta: float, dt: float, n: int) -> np.ndarray:
    """Taylor coefficients of sqrt(delta(zeta)/dt + eta^2)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return _shifted_cached(Method.parse(method), float(eta), float(dt), int(n))

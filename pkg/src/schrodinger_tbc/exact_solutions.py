"""Closed-form solutions of i u_t + u_xx + u_yy = 0: superpositions of
moving chirped Gaussians and moving Hermite-Gaussians."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

__all__ = [
    "ChirpedGaussianTerm",
    "HermiteGaussianTerm",
    "ProfilePreset",
    "PRESETS",
    "get_preset",
    "eval_profile",
    "eval_gradient",
    "profile_normal_derivative",
    "eval_hermite_all",
    "cg_factor",
    "hg_factor",
    "energy_content",
]


def eval_hermite_all(m_max: int, x) -> np.ndarray:
    """Physicists' Hermite polynomials H_0..H_{m_max} (rows)."""
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    x = np.asarray(x)
    H = np.empty((m_max + 1,) + x.shape, dtype=np.result_type(x, float))
    H[0] = 1.0
    if m_max >= 1:
        H[1] = 2.0 * x
    for n in range(1, m_max):
        H[n + 1] = 2.0 * x * H[n] - 2.0 * n * H[n - 1]
    return H


def cg_factor(x, t, a: float, b: float):
    """(1 + 4i(a+ib)t)^{-1/2} exp(-(a+ib) x^2 / (1 + 4i(a+ib)t)) and its
    x-derivative."""
    c = a + 1j * b
    # Im(den) = 4at vanishes only at t = 0 (den = 1), so for a > 0 the
    # principal square root is continuous in t.
    den = 1.0 + 4j * c * t
    g = np.exp(-c * np.asarray(x) ** 2 / den) / np.sqrt(den)
    return g, -2.0 * c * np.asarray(x) / den * g


def _hg_parts(t, a: float):
    t = np.asarray(t, dtype=float)
    inv_mu = 1.0 / a + 4j * t
    mu = 1.0 / inv_mu
    w = np.sqrt(1.0 + (4.0 * a * t) ** 2)
    theta = np.angle(a * inv_mu)
    return mu, w, theta


def _hg_gamma(m: int, a: float) -> float:
    return math.sqrt(2.0**m * math.factorial(m) * math.sqrt(math.pi) / math.sqrt(2.0 * a))


def hg_factor(m: int, x, t, a: float):
    """Normalized Hermite-Gaussian G_m(x, t; a) and its x-derivative,
    the latter from d_x G_m = -sqrt((m+1)a) G_{m+1} + sqrt(m a) G_{m-1}."""
    x = np.asarray(x, dtype=float)
    mu, w, theta = _hg_parts(t, a)
    H = eval_hermite_all(m + 1, math.sqrt(2.0 * a) * x / w)
    base = np.sqrt(mu / a) * np.exp(-mu * x**2)

    def G(n):
        return H[n] * base * np.exp(-1j * n * theta) / _hg_gamma(n, a)

    g = G(m)
    dg = -math.sqrt((m + 1) * a) * G(m + 1)
    if m > 0:
        dg = dg + math.sqrt(m * a) * G(m - 1)
    return g, dg


@dataclass(frozen=True)
class ChirpedGaussianTerm:
    a: tuple[float, float]
    b: tuple[float, float]
    c: tuple[float, float]

    def __post_init__(self):
        if min(self.a) <= 0:
            raise ValueError("Gaussian widths must be positive")

    def factors(self, x1, x2, t):
        g1, d1 = cg_factor(np.asarray(x1) - self.c[0] * t, t, self.a[0], self.b[0])
        g2, d2 = cg_factor(np.asarray(x2) - self.c[1] * t, t, self.a[1], self.b[1])
        return (g1, d1), (g2, d2)


@dataclass(frozen=True)
class HermiteGaussianTerm:
    m: tuple[int, int]
    a: tuple[float, float]
    c: tuple[float, float]

    def __post_init__(self):
        if min(self.a) <= 0:
            raise ValueError("Gaussian widths must be positive")
        if min(self.m) < 0:
            raise ValueError("Hermite orders must be non-negative")

    def factors(self, x1, x2, t):
        g1, d1 = hg_factor(self.m[0], np.asarray(x1) - self.c[0] * t, t, self.a[0])
        g2, d2 = hg_factor(self.m[1], np.asarray(x2) - self.c[1] * t, t, self.a[1])
        return (g1, d1), (g2, d2)


def _term_value_grad(term, x1, x2, t):
    (g1, d1), (g2, d2) = term.factors(x1, x2, t)
    c1, c2 = term.c
    wave = np.exp(0.5j * (c1 * np.asarray(x1) + c2 * np.asarray(x2)) - 0.25j * (c1 * c1 + c2 * c2) * t)
    val = g1 * g2 * wave
    gx = (d1 * g2 + 0.5j * c1 * g1 * g2) * wave
    gy = (g1 * d2 + 0.5j * c2 * g1 * g2) * wave
    return val, gx, gy


def _rat(s: str) -> float:
    """Printed decimals like '1/2.5' stored as exact rationals."""
    num, den = s.split("/")
    return float(Fraction(num) / Fraction(den))


_CG_A = [("1/2.5", "1/2.4"), ("1/2.3", "1/2.2"), ("1/2.7", "1/2.6"), ("1/2.2", "1/2.5")]
_CG_B = ("1/2", "1/2")
_HG_M = [(1, 2), (2, 1), (2, 1), (1, 2)]
_THETA = {
    "IA": (0.0, math.pi),
    "IB": (math.pi / 4, 5 * math.pi / 4),
    "IIA": (0.0, math.pi / 2, math.pi, 3 * math.pi / 2),
    "IIB": (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4),
}


@dataclass(frozen=True)
class ProfilePreset:
    family: str  # "CG" or "HG"
    kind: str  # IA, IB, IIA, IIB
    A0: float = 2.0
    c0: float = 4.0
    f_mag: float = field(default=4.0)

    @property
    def name(self) -> str:
        return f"{self.family}-{self.kind}".lower()

    @property
    def thetas(self) -> tuple[float, ...]:
        return _THETA[self.kind]

    @property
    def terms(self) -> list:
        out = []
        for j, th in enumerate(self.thetas):
            c = (self.c0 * math.cos(th), self.c0 * math.sin(th))
            a = tuple(_rat(s) for s in _CG_A[j])
            if self.family == "CG":
                b = tuple(_rat(s) for s in _CG_B)
                out.append(ChirpedGaussianTerm(a, b, c))
            else:
                out.append(HermiteGaussianTerm(_HG_M[j], a, c))
        return out

    def with_overrides(self, c0=None, A0=None) -> "ProfilePreset":
        kw = {}
        if c0 is not None:
            kw["c0"] = float(c0)
        if A0 is not None:
            kw["A0"] = float(A0)
        return replace(self, **kw)

    def __call__(self, x1, x2, t: float = 0.0):
        return eval_profile(self, x1, x2, t)


PRESETS = {
    f"{fam.lower()}-{kind.lower()}": ProfilePreset(fam, kind, f_mag=4.0 if fam == "CG" else 8.0)
    for fam in ("CG", "HG")
    for kind in ("IA", "IB", "IIA", "IIB")
}


def get_preset(name: str, c0: float | None = None, A0: float | None = None) -> ProfilePreset:
    key = name.lower()
    if key not in PRESETS:
        raise ValueError(f"unknown profile preset {name!r}; choose from {', '.join(PRESETS)}")
    return PRESETS[key].with_overrides(c0=c0, A0=A0)


def eval_gradient(preset: ProfilePreset, x1, x2, t: float):
    """(u, du/dx1, du/dx2) of the superposition."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    val = np.zeros(np.broadcast(x1, x2).shape, complex)
    gx = np.zeros_like(val)
    gy = np.zeros_like(val)
    for term in preset.terms:
        v, a, b = _term_value_grad(term, x1, x2, t)
        val += v
        gx += a
        gy += b
    return preset.A0 * val, preset.A0 * gx, preset.A0 * gy


def eval_profile(preset: ProfilePreset, x1, x2, t: float = 0.0):
    return eval_gradient(preset, x1, x2, t)[0]


def profile_normal_derivative(preset: ProfilePreset, domain, seg: str, x1, x2, t: float, atol: float = 1e-9):
    """Outward normal derivative on segment ``seg`` of the rectangle."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if seg in ("l", "r"):
        edge = domain.x_r if seg == "r" else domain.x_l
        if np.any(np.abs(x1 - edge) > atol):
            raise ValueError(f"point not on segment {seg}")
    elif seg in ("b", "t"):
        edge = domain.x_t if seg == "t" else domain.x_b
        if np.any(np.abs(x2 - edge) > atol):
            raise ValueError(f"point not on segment {seg}")
    else:
        raise ValueError(f"unknown segment {seg!r}")
    _, gx, gy = eval_gradient(preset, x1, x2, t)
    s = 1.0 if seg in ("r", "t") else -1.0
    return s * (gx if seg in ("l", "r") else gy)


def energy_content(preset: ProfilePreset, domain, t: float, N1: int, N2: int | None = None) -> float:
    """int_Omega |u(x,t)|^2 / int_Omega |u(x,0)|^2 by LGL tensor quadrature."""
    from .spectral_core import lgl_grid

    N2 = N1 if N2 is None else N2
    g1, g2 = lgl_grid(N1), lgl_grid(N2)
    X1, X2 = domain.to_physical(g1.nodes[:, None], g2.nodes[None, :])
    w = np.outer(g1.weights, g2.weights)
    m0 = np.sum(w * np.abs(eval_profile(preset, X1, X2, 0.0)) ** 2)
    if m0 == 0:
        raise ValueError("initial mass is zero")
    mt = np.sum(w * np.abs(eval_profile(preset, X1, X2, t)) ** 2)
    return float(mt / m0)

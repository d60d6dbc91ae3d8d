"""Degree-(1,1) lifting of segment histories and corner data.

A field is written u = w + chi with w in the tensor Robin-adapted space and

    chi = sum_{a1 in l,r} -s1 alpha1 chi_{a1}(y1) B_{a1}(y2)
        + sum_{a2 in b,t} -s2 alpha2 B_{a2}(y1) chi_{a2}(y2)
        + sum_{corners}   -s1 s2 alpha1 alpha2 C_{a1a2} chi_{a1}(y1) chi_{a2}(y2)

where chi_r, chi_t are the "plus" and chi_l, chi_b the "minus" 1D lifts.
When the histories are mutually compatible at the corners, chi meets both
the segment Robin conditions and the mixed corner conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..boundary_1d import Lifting1D, make_lifting
from ..spectral_core import d2_legendre_coeffs
from .domain import CORNERS, HORIZONTAL, SIGN, VERTICAL


@dataclass(frozen=True)
class Lifting2D:
    kappa1: complex
    kappa2: complex
    axis1: Lifting1D
    axis2: Lifting1D

    def segment_lift(self, seg: str) -> np.ndarray:
        """(c0, c1) of the 1D lift attached to a segment label."""
        if seg in VERTICAL:
            c = self.axis1.chi_plus if seg == "r" else self.axis1.chi_minus
        else:
            c = self.axis2.chi_plus if seg == "t" else self.axis2.chi_minus
        return np.array(c, dtype=complex)

    def corner_lift(self, corner: str) -> np.ndarray:
        """2x2 coefficient block of chi_{a1}(y1) chi_{a2}(y2)."""
        return np.outer(self.segment_lift(corner[0]), self.segment_lift(corner[1]))


def lift_2d(kappa1: complex, kappa2: complex) -> Lifting2D:
    return Lifting2D(complex(kappa1), complex(kappa2), make_lifting(kappa1), make_lifting(kappa2))


def corner_block(lifting: Lifting2D, C: dict, alpha1: complex, alpha2: complex) -> np.ndarray:
    """2x2 block of the corner lift terms (Legendre modes (0..1, 0..1))."""
    G = np.zeros((2, 2), dtype=complex)
    for c in CORNERS:
        val = C.get(c, 0.0)
        if val == 0:
            continue
        s = SIGN[c[0]] * SIGN[c[1]]
        G += -s * alpha1 * alpha2 * val * lifting.corner_lift(c)
    return G


def lift_field(
    lifting: Lifting2D, B: dict, C: dict, alpha1: complex, alpha2: complex, shape
) -> np.ndarray:
    n1, n2 = shape
    chi = np.zeros((n1, n2), dtype=complex)
    for a1 in VERTICAL:
        b = B.get(a1)
        if b is not None:
            chi[:2, :] += -SIGN[a1] * alpha1 * np.outer(lifting.segment_lift(a1), b)
    for a2 in HORIZONTAL:
        b = B.get(a2)
        if b is not None:
            chi[:, :2] += -SIGN[a2] * alpha2 * np.outer(b, lifting.segment_lift(a2))
    chi[:2, :2] += corner_block(lifting, C, alpha1, alpha2)
    return chi


def helmholtz_apply(U, alpha1: complex, alpha2: complex) -> np.ndarray:
    """(1 - alpha1^{-2} d_1^2 - alpha2^{-2} d_2^2) applied to Legendre coefficients."""
    U = np.asarray(U)
    return U - alpha1**-2 * d2_legendre_coeffs(U) - alpha2**-2 * d2_legendre_coeffs(U.T).T

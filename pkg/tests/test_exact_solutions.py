import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from schrodinger_tbc.exact_solutions import (
    PRESETS,
    ChirpedGaussianTerm,
    HermiteGaussianTerm,
    ProfilePreset,
    eval_gradient,
    eval_hermite_all,
    eval_profile,
    get_preset,
    hg_factor,
    energy_content,
    profile_normal_derivative,
)
from schrodinger_tbc.tbc_2d import DomainMap

DOM = DomainMap(-10.0, 10.0, -10.0, 10.0, 1e-3, "BDF1")


def single_cg(a=(1.0, 1.0), b=(0.0, 0.0), c=(0.0, 0.0)):
    """A one-term preset with A0 = 1, used for the closed-form examples."""

    class One(ProfilePreset):
        @property
        def terms(self):
            return [ChirpedGaussianTerm(a, b, c)]

    return One("CG", "IA", A0=1.0, c0=0.0)


# ---- Hermite polynomials ----------------------------------------------------------


def test_hermite_examples():
    x = 0.7
    H = eval_hermite_all(4, x)
    assert H[0] == 1 and H[1] == 2 * x
    assert H[2] == pytest.approx(4 * x * x - 2, abs=1e-15)
    assert eval_hermite_all(3, 0.0)[3] == 0
    assert eval_hermite_all(4, 1.0)[4] == -20


def test_hermite_vs_numpy():
    x = np.linspace(-3, 3, 13)
    H = eval_hermite_all(8, x)
    for n in range(9):
        ref = np.polynomial.hermite.hermval(x, np.eye(9)[n])
        assert np.allclose(H[n], ref, rtol=1e-13, atol=1e-12)


def test_hermite_rejects_negative():
    with pytest.raises(ValueError):
        eval_hermite_all(-1, 0.0)


# ---- profile values -------------------------------------------------------------


def test_cg_single_term_origin():
    assert eval_profile(single_cg(), 0.0, 0.0, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_cg_single_term_spreading():
    assert eval_profile(single_cg(), 0.0, 0.0, 1.0) == pytest.approx(1 / (1 + 4j), abs=1e-15)


def test_cg_reduces_at_t0():
    p = single_cg(a=(0.4, 0.3), b=(0.5, -0.2))
    x, y = 1.3, -0.7
    ref = np.exp(-(0.4 + 0.5j) * x * x - (0.3 - 0.2j) * y * y)
    assert eval_profile(p, x, y, 0.0) == pytest.approx(ref, rel=1e-15)


def test_hg_m0_derivative_relation():
    a, t = 0.4, 0.37
    x = np.linspace(-2, 2, 9)
    _, dg0 = hg_factor(0, x, t, a)
    g1, _ = hg_factor(1, x, t, a)
    assert np.allclose(dg0, -np.sqrt(a) * g1, atol=1e-15)


def test_hg_normalized_at_t0():
    for m in range(4):
        val = integrate.quad(lambda x: abs(hg_factor(m, x, 0.0, 0.4)[0]) ** 2, -30, 30)[0]
        assert val == pytest.approx(1.0, rel=1e-10)


def test_hg_odd_parity_zero():
    p = get_preset("hg-ia", c0=4.0)
    t = 0.3
    for term in p.terms:
        if term.m[0] % 2:
            (g1, _), _ = term.factors(term.c[0] * t, 0.4, t)
            assert abs(g1) <= 1e-15


def test_preset_tables():
    cg = get_preset("cg-iia").terms
    printed = [(2.5, 2.4), (2.3, 2.2), (2.7, 2.6), (2.2, 2.5)]
    for tm, (d1, d2) in zip(cg, printed):
        assert tm.a == pytest.approx((1 / d1, 1 / d2), rel=1e-16)
    assert all(tm.b == (0.5, 0.5) for tm in cg)
    hg = get_preset("hg-iib").terms
    assert [tm.m for tm in hg] == [(1, 2), (2, 1), (2, 1), (1, 2)]
    assert len(get_preset("cg-ia").terms) == 2 and len(get_preset("hg-iib").terms) == 4
    assert get_preset("cg-ia").A0 == 2.0
    ib = get_preset("cg-ib").thetas
    assert ib == pytest.approx((math.pi / 4, 5 * math.pi / 4))
    assert PRESETS["hg-ia"].f_mag == 8 and PRESETS["cg-ia"].f_mag == 4
    c = get_preset("cg-iib", c0=8).terms[0].c
    assert c == pytest.approx((8 / math.sqrt(2), 8 / math.sqrt(2)))


def test_preset_errors():
    with pytest.raises(ValueError):
        get_preset("cg-iii")
    with pytest.raises(ValueError):
        ChirpedGaussianTerm((0.0, 1.0), (0, 0), (0, 0))
    with pytest.raises(ValueError):
        HermiteGaussianTerm((-1, 0), (1.0, 1.0), (0, 0))


# ---- PDE residual and derivatives by finite differences ------------------------------

# sixth-order central stencils
D1 = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
D2 = np.array([2, -27, 270, -490, 270, -27, 2]) / 180.0
OFF = np.arange(-3, 4)


def _pde_residual(p, x, y, t, h=2.5e-3):
    ut = sum(w * eval_profile(p, x, y, t + k * h) for w, k in zip(D1, OFF)) / h
    uxx = sum(w * eval_profile(p, x + k * h, y, t) for w, k in zip(D2, OFF)) / h**2
    uyy = sum(w * eval_profile(p, x, y + k * h, t) for w, k in zip(D2, OFF)) / h**2
    return 1j * ut + uxx + uyy


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_solve_schrodinger(name):
    p = get_preset(name, c0=4.0)
    rng = np.random.default_rng(sorted(PRESETS).index(name))
    t = rng.uniform(0.05, 2.0, 100)
    # half the samples near a packet centre, half anywhere in the box
    centre = np.array([p.terms[0].c]) * t[:, None]
    pts = np.where(np.arange(100)[:, None] < 50, centre + rng.normal(0, 1.5, (100, 2)), rng.uniform(-10, 10, (100, 2)))
    scale = np.max(np.abs(eval_profile(p, *np.meshgrid(np.linspace(-10, 10, 81), np.linspace(-10, 10, 81)), 0.0)))
    res = _pde_residual(p, pts[:, 0], pts[:, 1], t)
    assert np.max(np.abs(res)) <= 1e-6 * scale


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_gradient_vs_finite_differences(name):
    p = get_preset(name, c0=8.0)
    rng = np.random.default_rng(7)
    x, y = rng.uniform(-3, 3, (2, 40))
    t = 0.2
    h = 1e-3
    u, gx, gy = eval_gradient(p, x, y, t)
    fx = sum(w * eval_profile(p, x + k * h, y, t) for w, k in zip(D1, OFF)) / h
    fy = sum(w * eval_profile(p, x, y + k * h, t) for w, k in zip(D1, OFF)) / h
    scale = np.maximum(np.abs(gx), np.abs(gy))
    keep = scale > 1e-3 * scale.max()  # away from zeros
    assert np.max(np.abs(gx - fx)[keep] / scale[keep]) <= 1e-7
    assert np.max(np.abs(gy - fy)[keep] / scale[keep]) <= 1e-7


def test_normal_derivative_symmetric_gaussian():
    a1 = 0.05
    p = single_cg(a=(a1, 0.05))
    got = profile_normal_derivative(p, DOM, "r", 10.0, 0.0, 0.0)
    assert got == pytest.approx(-2 * a1 * 10.0 * eval_profile(p, 10.0, 0.0, 0.0), rel=1e-14)


@pytest.mark.parametrize("seg", ["l", "r", "b", "t"])
def test_normal_derivative_signs_vs_fd(seg):
    p = get_preset("cg-iib", c0=8.0)
    s = np.linspace(-10, 10, 11)
    t, h = 1.1, 1e-3
    if seg in ("l", "r"):
        x1 = np.full_like(s, -10.0 if seg == "l" else 10.0)
        x2 = s
        n = (-1.0 if seg == "l" else 1.0, 0.0)
    else:
        x1 = s
        x2 = np.full_like(s, -10.0 if seg == "b" else 10.0)
        n = (0.0, -1.0 if seg == "b" else 1.0)
    fd = sum(w * eval_profile(p, x1 + n[0] * k * h, x2 + n[1] * k * h, t) for w, k in zip(D1, OFF)) / h
    got = profile_normal_derivative(p, DOM, seg, x1, x2, t)
    assert np.max(np.abs(got - fd)) <= 1e-7 * np.max(np.abs(fd))


def test_normal_derivative_rejects_off_boundary():
    p = get_preset("cg-ia")
    with pytest.raises(ValueError):
        profile_normal_derivative(p, DOM, "r", 9.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        profile_normal_derivative(p, DOM, "q", 10.0, 0.0, 0.0)


# ---- energy content --------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_energy_one_at_t0(name):
    assert energy_content(get_preset(name), DOM, 0.0, 48) == pytest.approx(1.0, abs=1e-14)


def test_energy_fast_profile_leaves():
    assert energy_content(get_preset("cg-ia", c0=16), DOM, 5.0, 128) < 0.05


def test_energy_vs_adaptive_quadrature():
    p = single_cg()  # stationary, a = (1, 1)
    ref_t = integrate.dblquad(lambda y, x: abs(eval_profile(p, x, y, 1.0)) ** 2, -10, 10, -10, 10, epsabs=1e-13, epsrel=1e-12)[0]
    ref_0 = integrate.dblquad(lambda y, x: abs(eval_profile(p, x, y, 0.0)) ** 2, -10, 10, -10, 10, epsabs=1e-13, epsrel=1e-12)[0]
    assert energy_content(p, DOM, 1.0, 96) == pytest.approx(ref_t / ref_0, abs=1e-8)


@given(st.floats(0.0, 5.0), st.sampled_from(sorted(PRESETS)))
@settings(max_examples=25, deadline=None)
def test_energy_bounded(t, name):
    # c0=8 interference terms in |u|^2 need N >= 96 for the quadrature to resolve them
    e = energy_content(get_preset(name, c0=8), DOM, t, 128)
    assert 0 < e <= 1 + 1e-10


def test_energy_rejects_zero_mass():
    with pytest.raises(ValueError):
        energy_content(get_preset("cg-ia", A0=0.0), DOM, 1.0, 16)

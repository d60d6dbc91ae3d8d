import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import legendre as npleg

from schrodinger_tbc.spectral_core import (
    BandedMatrix,
    PivotBreakdownError,
    assemble_system_1d,
    banded_lu,
    banded_solve,
    build_basis,
    d1_legendre_coeffs,
    d2_legendre_coeffs,
    inverse_transform,
    legendre_eval_all,
    legendre_transform,
    lgl_grid,
    project_rhs,
)

rng = np.random.default_rng(1234)


def crandn(*shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# ---- legendre_eval_all ----------------------------------------------------


def test_legendre_at_one():
    assert np.array_equal(legendre_eval_all(2, 1.0), [1.0, 1.0, 1.0])


def test_legendre_at_zero():
    assert np.allclose(legendre_eval_all(2, 0.0), [1.0, 0.0, -0.5], atol=0, rtol=0)


def test_legendre_endpoint_parity():
    vals = legendre_eval_all(30, -1.0)
    assert np.array_equal(vals, (-1.0) ** np.arange(31))


def test_legendre_vs_extended_precision():
    mpmath.mp.dps = 40
    ref = [float(mpmath.legendre(n, mpmath.mpf("0.3"))) for n in range(5)]
    assert np.max(np.abs(legendre_eval_all(4, 0.3) - ref)) <= 1e-14


def test_legendre_rejects_outside_interval():
    with pytest.raises(ValueError):
        legendre_eval_all(3, 1.5)


# ---- lgl_grid --------------------------------------------------------------


def test_lgl_n2():
    g = lgl_grid(2)
    assert np.allclose(g.nodes, [-1, 0, 1], atol=1e-16)
    assert np.allclose(g.weights, [1 / 3, 4 / 3, 1 / 3], atol=1e-15)


def test_lgl_n3_interior_nodes():
    g = lgl_grid(3)
    assert np.allclose(g.nodes[1:3], [-1 / np.sqrt(5), 1 / np.sqrt(5)], atol=1e-15)


@pytest.mark.parametrize("N", [1, 2, 5, 16, 47, 95, 199])
def test_lgl_weights_sum_and_residual(N):
    g = lgl_grid(N)
    assert abs(g.weights.sum() - 2.0) <= 1e-13
    assert np.all(np.diff(g.nodes) > 0) and g.nodes[0] == -1 and g.nodes[-1] == 1
    # (1 - y^2) L'_N(y) = N (L_{N-1} - y L_N), evaluated in extended precision
    mpmath.mp.dps = 40
    res = max(
        abs(N * (mpmath.legendre(N - 1, mpmath.mpf(v)) - mpmath.mpf(v) * mpmath.legendre(N, mpmath.mpf(v))))
        for v in g.nodes
    )
    # the residual's slope at a node is N(N+1)|L_N|, so scale by N(N+1)
    assert float(res) / (N * (N + 1)) <= 1e-16
    if N <= 16:
        assert float(res) <= 1e-14


def test_lgl_nodes_vs_mpmath_roots():
    N = 12
    mpmath.mp.dps = 30
    ref = sorted(
        float(r)
        for r in mpmath.polyroots(
            [mpmath.mpf(c) for c in npleg.leg2poly(npleg.legder(np.eye(N + 1)[N]))[::-1]],
            maxsteps=200,
            extraprec=200,
        )
    )
    assert np.max(np.abs(lgl_grid(N).nodes[1:-1] - ref)) <= 1e-14


def test_lgl_quadrature_exactness():
    N = 20
    g = lgl_grid(N)
    for deg in range(2 * N):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert abs(np.sum(g.weights * g.nodes**deg) - exact) <= 1e-13


def test_lgl_rejects_zero():
    with pytest.raises(ValueError):
        lgl_grid(0)


# ---- transforms -------------------------------------------------------------


def test_transform_of_L3():
    N = 6
    y = lgl_grid(N).nodes
    c = legendre_transform(legendre_eval_all(N, y)[3])
    assert np.allclose(c, np.eye(N + 1)[3], atol=1e-14)


def test_transform_of_constant():
    c = legendre_transform(np.ones(9))
    assert np.allclose(c, np.eye(9)[0], atol=1e-15)


@pytest.mark.parametrize("N", [4, 17, 64])
def test_roundtrip_vs_vandermonde(N):
    coeffs = crandn(N + 1)
    y = lgl_grid(N).nodes
    samples = npleg.legvander(y, N) @ coeffs  # dense Vandermonde oracle
    assert np.max(np.abs(legendre_transform(samples) - coeffs)) <= 1e-12
    assert np.max(np.abs(inverse_transform(coeffs) - samples)) <= 1e-12


def test_transform_length_mismatch():
    with pytest.raises(ValueError):
        legendre_transform(np.ones(5), N=6)
    with pytest.raises(ValueError):
        inverse_transform(np.ones(5), N=3)


# ---- basis and system matrices -----------------------------------------------


def test_basis_examples():
    b = build_basis(4, 1.0).b
    assert b[0] == pytest.approx(-0.25, abs=1e-16)
    # -(1 + 1)/(1 + 6): the Robin constraints below confirm this value
    assert b[1] == pytest.approx(-2 / 7, abs=1e-16)
    # b_p + 1 = (2p + 3)/(kappa + (p+2)(p+3)/2) decays like 4/p
    tail = build_basis(4000, 1.0).b + 1
    assert np.all(np.diff(np.abs(tail)) < 0)
    assert abs(tail[-1]) < 1.01 * 4 / 3998


@pytest.mark.parametrize("kappa", [1.0, 0.3 - 2.1j, 15.0 * np.exp(-0.25j * np.pi)])
def test_basis_satisfies_robin(kappa):
    N = 30
    B = build_basis(N, kappa).change_matrix()  # columns: Legendre coeffs of phi_p
    n = np.arange(N + 1)
    val_m, val_p = (-1.0) ** n, np.ones(N + 1)
    der_m = (-1.0) ** (n + 1) * n * (n + 1) / 2
    der_p = n * (n + 1) / 2
    left = (der_m - kappa * val_m) @ B
    right = (der_p + kappa * val_p) @ B
    scale = np.abs(der_p) @ np.abs(B) + abs(kappa) * (np.abs(val_p) @ np.abs(B))
    assert np.max(np.abs(left) / scale) <= 1e-13
    assert np.max(np.abs(right) / scale) <= 1e-13


def test_basis_rejects_singular_kappa():
    with pytest.raises(ValueError):
        build_basis(6, -3.0)  # kappa + (0+2)(0+3)/2 = 0


def test_stiffness_example():
    s = assemble_system_1d(build_basis(4, 1.0))
    assert s.S[0] == pytest.approx(1.5, abs=1e-15)


def _dense_inner(B, N, second=False):
    """(phi_j, phi_k) or -(phi_j, phi_k'') by LGL quadrature of order N+2."""
    g = lgl_grid(N + 2)
    V = npleg.legvander(g.nodes, N)
    cols = -np.stack([npleg.legval(g.nodes, npleg.legder(B[:, k], 2)) for k in range(B.shape[1])], 1) if second else V @ B
    return (V @ B).T @ (g.weights[:, None] * cols)


@pytest.mark.parametrize("kappa", [1.0, 2.0 - 3.0j, 40 * np.exp(-0.25j * np.pi)])
def test_system_matrices_vs_quadrature(kappa):
    N = 16
    basis = build_basis(N, kappa)
    sysm = assemble_system_1d(basis)
    B = basis.change_matrix()
    M = sysm.M.to_dense()
    assert np.array_equal(M, M.T)
    off = np.abs(np.subtract.outer(np.arange(N - 1), np.arange(N - 1)))
    assert np.all(M[(off != 0) & (off != 2)] == 0)
    scale = np.max(np.abs(M))
    assert np.max(np.abs(M - _dense_inner(B, N))) <= 1e-12 * scale
    S = _dense_inner(B, N, second=True)
    assert np.max(np.abs(S - np.diag(sysm.S))) <= 1e-12 * np.max(np.abs(sysm.S))


def test_mass_closed_form():
    basis = build_basis(10, 0.7 + 0.2j)
    M = assemble_system_1d(basis).M.to_dense()
    b = basis.b
    for k in range(9):
        assert abs(M[k, k] - (2 / (2 * k + 1) + 2 * b[k] ** 2 / (2 * k + 5))) <= 1e-14
        if k >= 2:
            assert abs(M[k - 2, k] - 2 * b[k - 2] / (2 * k + 1)) <= 1e-14
        if k + 2 < 9:
            assert abs(M[k + 2, k] - 2 * b[k] / (2 * k + 5)) <= 1e-14


def test_quadrature_matrix_is_change_transpose():
    basis = build_basis(7, 1.3)
    s = assemble_system_1d(basis)
    assert np.array_equal(s.quadrature_matrix(), basis.change_matrix().T)


# ---- project_rhs ----------------------------------------------------------------


def test_project_rhs_examples():
    basis = build_basis(6, 1.0)
    g = project_rhs(basis, np.eye(7)[0])
    assert g[0] == 2 and np.all(g[1:] == 0)
    g = project_rhs(basis, np.eye(7)[2])
    assert g[0] == pytest.approx(-0.1, abs=1e-16)


def test_project_rhs_vs_quadrature():
    N = 24
    basis = build_basis(N, 3.0 - 1.0j)
    g = lgl_grid(N)
    f = crandn(N + 1) * np.exp(-np.arange(N + 1) / 6)
    samples = np.exp(1j * g.nodes) * np.cos(3 * g.nodes)
    # direct LGL quadrature of (f, phi_p) on a finer grid, f a polynomial
    fine = lgl_grid(N + 2)
    phi = npleg.legvander(fine.nodes, N) @ basis.change_matrix()
    direct = (fine.weights * npleg.legval(fine.nodes, f)) @ phi
    assert np.max(np.abs(project_rhs(basis, f) - direct)) <= 1e-12 * np.max(np.abs(direct))
    # sampled f: project_rhs after the transform equals discrete quadrature
    phi_n = npleg.legvander(g.nodes, N) @ basis.change_matrix()
    disc = (g.weights * samples) @ phi_n
    got = project_rhs(basis, legendre_transform(samples))
    # the two differ only through the L_N end correction, which touches g_{N-2}
    assert np.max(np.abs(got[:-1] - disc[:-1])) <= 1e-12


def test_project_rhs_length_mismatch():
    with pytest.raises(ValueError):
        project_rhs(build_basis(6, 1.0), np.zeros(6))


# ---- derivatives -----------------------------------------------------------------


def test_d2_examples():
    assert np.allclose(d2_legendre_coeffs(np.eye(3)[2]), [3, 0, 0], atol=0)
    assert np.all(d2_legendre_coeffs(np.eye(3)[1]) == 0)


@given(st.integers(0, 2**32 - 1), st.integers(1, 40))
@settings(max_examples=40, deadline=None)
def test_derivatives_vs_numpy(seed, N):
    r = np.random.default_rng(seed)
    c = r.standard_normal(N + 1) + 1j * r.standard_normal(N + 1)
    d1 = npleg.legder(c, 1)
    d2 = npleg.legder(c, 2) if N >= 2 else np.zeros(1)
    scale = max(1.0, np.max(np.abs(d2)))
    got1 = d1_legendre_coeffs(c)
    got2 = d2_legendre_coeffs(c)
    assert np.max(np.abs(got1[: d1.size] - d1)) <= 1e-12 * max(1.0, np.max(np.abs(d1)))
    assert np.max(np.abs(got2[: d2.size] - d2)) <= 1e-12 * scale
    assert np.all(got2[max(N - 1, 1):] == 0)


def test_d2_degree8_vs_dense_differentiation():
    c = crandn(9)
    g = lgl_grid(8)
    # dense nodal differentiation matrix from the Vandermonde
    V = npleg.legvander(g.nodes, 8)
    Vd = np.stack([npleg.legval(g.nodes, npleg.legder(np.eye(9)[k])) for k in range(9)], 1)
    D = Vd @ np.linalg.inv(V)
    ref = D @ D @ (V @ c)
    assert np.max(np.abs(inverse_transform(d2_legendre_coeffs(c)) - ref)) <= 1e-12 * np.max(np.abs(ref)) * 10


# ---- banded LU ----------------------------------------------------------------------


def test_banded_identity():
    A = BandedMatrix.from_dense(np.eye(7), 2, 2)
    b = crandn(7)
    assert np.array_equal(banded_solve(banded_lu(A), b), b)


def test_banded_vs_dense_pentadiagonal():
    n = 50
    A = np.zeros((n, n), complex)
    for off in (-2, -1, 0, 1, 2):
        A += np.diag(crandn(n - abs(off)), off)
    A += np.diag(np.sum(np.abs(A), 1) + 1)
    b = crandn(n)
    x = banded_solve(banded_lu(BandedMatrix.from_dense(A, 2, 2)), b)
    ref = np.linalg.solve(A, b)
    assert np.max(np.abs(x - ref)) / np.max(np.abs(ref)) <= 1e-11
    X = banded_solve(banded_lu(BandedMatrix.from_dense(A, 2, 2)), np.stack([b, 2 * b], 1))
    assert np.allclose(X[:, 1], 2 * x, atol=1e-12)


def test_banded_pivot_breakdown():
    A = np.diag(np.arange(1.0, 6.0))
    A[2, 2] = 0.0
    with pytest.raises(PivotBreakdownError):
        banded_lu(BandedMatrix.from_dense(A, 1, 1))


def test_banded_rejects_out_of_band():
    A = np.eye(5)
    A[0, 4] = 1.0
    with pytest.raises(ValueError):
        BandedMatrix.from_dense(A, 1, 1)
    with pytest.raises(ValueError):
        BandedMatrix(5, 1, 1, np.zeros((5, 2)))


def test_banded_lu_keeps_bandwidth():
    n = 12
    A = np.diag(np.full(n, 4.0)) + np.diag(np.ones(n - 2), 2) + np.diag(np.ones(n - 2), -2)
    lu = banded_lu(BandedMatrix.from_dense(A, 2, 2))
    assert lu.data.shape == (n, 5)


@pytest.mark.parametrize("kappa", [1.0, 30 * np.exp(-0.25j * np.pi), 2e3 * np.exp(-0.25j * np.pi)])
def test_helmholtz_banded_vs_dense(kappa):
    sysm = assemble_system_1d(build_basis(8, kappa))
    A = sysm.helmholtz(1.0 / kappa**2)
    b = crandn(A.n)
    x = banded_solve(banded_lu(A), b)
    ref = np.linalg.solve(A.to_dense(), b)
    assert np.linalg.norm(x - ref) / np.linalg.norm(ref) <= 1e-10

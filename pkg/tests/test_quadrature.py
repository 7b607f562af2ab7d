import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import legendre as npleg
from numpy.polynomial import polynomial as nppoly

from splitdg.errors import NonConvergence
from splitdg.quadrature import (MAX_DEGREE, _lgl_interior_nodes, build_lgl, differentiation_matrix,
                                dump_csv, interpolation_matrix, lagrange_eval, legendre_eval,
                                quad_integrate, sbp_defect)
from splitdg.verify import monomial_defect

degrees = st.integers(min_value=1, max_value=32)


def reference_lgl(N):
    """Nodes as roots of P_N' from numpy's Legendre class; weights from the closed form."""
    PN = npleg.Legendre.basis(N)
    interior = np.sort(PN.deriv().roots().real)
    s = np.concatenate([[-1.0], interior, [1.0]])
    return s, 2.0 / (N * (N + 1) * PN(s) ** 2)


@pytest.mark.parametrize("N,x,expected", [(1, 0.5, (0.5, 1.0)), (2, 0.0, (-0.5, 0.0)),
                                          (2, 1.0, (1.0, 3.0))])
def test_legendre_eval_examples(N, x, expected):
    assert np.allclose(legendre_eval(N, x), expected, atol=1e-15)


@given(st.integers(0, 20), st.floats(-1, 1))
def test_legendre_eval_matches_numpy(N, x):
    P, dP = legendre_eval(N, x)
    ref = npleg.Legendre.basis(N)
    assert abs(P - ref(x)) <= 1e-12
    assert abs(dP - ref.deriv()(x)) <= 1e-10 * max(1.0, N * N)


def test_legendre_eval_vectorised():
    x = np.linspace(-1, 1, 7)
    P, dP = legendre_eval(3, x)
    assert P.shape == dP.shape == x.shape
    assert np.allclose(P, 0.5 * (5 * x**3 - 3 * x))


@pytest.mark.parametrize("N,nodes,weights", [
    (1, [-1, 1], [1, 1]),
    (2, [-1, 0, 1], [1 / 3, 4 / 3, 1 / 3]),
    (3, [-1, -1 / np.sqrt(5), 1 / np.sqrt(5), 1], [1 / 6, 5 / 6, 5 / 6, 1 / 6]),
])
def test_build_lgl_closed_forms(N, nodes, weights):
    q = build_lgl(N)
    assert np.allclose(q.nodes, nodes, atol=1e-15)
    assert np.allclose(q.weights, weights, atol=1e-15)


@pytest.mark.parametrize("N", [4, 7, 12, 20])
def test_build_lgl_matches_numpy_roots(N):
    s, w = reference_lgl(N)
    q = build_lgl(N)
    assert np.max(np.abs(q.nodes - s)) <= 1e-13
    assert np.max(np.abs(q.weights - w)) <= 1e-13


@settings(max_examples=32, deadline=None)
@given(degrees)
def test_quadrature_type_invariants(N):
    q = build_lgl(N)
    s = q.nodes
    assert s[0] == -1.0 and s[-1] == 1.0
    assert np.all(np.diff(s) > 0)
    assert np.max(np.abs(s + s[::-1])) <= 1e-14
    assert np.all(q.weights > 0)
    assert abs(q.weights.sum() - 2.0) <= 1e-13
    assert np.max(np.abs(q.diff_matrix.sum(axis=1))) <= 1e-13
    assert sbp_defect(q) <= 1e-12


@pytest.mark.parametrize("N,tol", [(1, 1e-14), (8, 1e-13), (32, 1e-12), (64, 1e-12)])
def test_sbp_defect(N, tol):
    assert sbp_defect(build_lgl(N)) <= tol


def test_build_lgl_range_and_cache():
    with pytest.raises(ValueError):
        build_lgl(0)
    with pytest.raises(ValueError):
        build_lgl(MAX_DEGREE + 1)
    assert build_lgl(5) is build_lgl(5)
    with pytest.raises(ValueError):
        build_lgl(5).nodes[0] = 0.0


def test_newton_reports_nonconvergence():
    with pytest.raises(NonConvergence):
        _lgl_interior_nodes(12, max_iter=1)


@pytest.mark.parametrize("N,j,x,expected", [(2, 1, 0.0, 1.0), (2, 0, 0.5, -0.125), (1, 1, 0.25, 0.625)])
def test_lagrange_eval_examples(N, j, x, expected):
    assert lagrange_eval(build_lgl(N), j, x) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 12), st.floats(-1, 1))
def test_lagrange_eval_matches_product_formula(N, x):
    q = build_lgl(N)
    s = q.nodes
    for j in range(q.n):
        others = np.delete(s, j)
        ref = np.prod((x - others) / (s[j] - others))
        assert abs(lagrange_eval(q, j, x) - ref) <= 1e-11


def test_lagrange_kronecker_and_orthogonality():
    q = build_lgl(6)
    L = interpolation_matrix(q, q.nodes)
    assert np.array_equal(L, np.eye(q.n))
    gram = np.array([[quad_integrate(q, L[:, i] * L[:, j]) for j in range(q.n)] for i in range(q.n)])
    assert np.max(np.abs(gram - np.diag(q.weights))) <= 1e-13


def test_differentiation_matrix_n1():
    assert np.allclose(build_lgl(1).diff_matrix, [[-0.5, 0.5], [-0.5, 0.5]], atol=1e-15)


def test_differentiation_matrix_x_squared():
    q = build_lgl(2)
    assert np.allclose(q.diff_matrix @ q.nodes**2, [-2, 0, 2], atol=1e-14)


@pytest.mark.parametrize("N", [3, 6, 10])
def test_differentiation_matrix_matches_polynomial_derivatives(N):
    # oracle: derivative of each Lagrange polynomial from its monomial coefficients
    q = build_lgl(N)
    s = q.nodes
    ref = np.empty((q.n, q.n))
    for i in range(q.n):
        others = np.delete(s, i)
        coeffs = nppoly.polyfromroots(others) / np.prod(s[i] - others)
        ref[:, i] = nppoly.polyval(s, nppoly.polyder(coeffs))
    assert np.max(np.abs(q.diff_matrix - ref)) <= 1e-11 * max(1.0, np.max(np.abs(ref)))
    assert np.array_equal(differentiation_matrix(q), q.diff_matrix)


@settings(max_examples=25, deadline=None)
@given(degrees)
def test_differentiation_exact_for_monomials(N):
    q = build_lgl(N)
    for k in range(N + 1):
        exact = k * q.nodes ** max(k - 1, 0) if k else np.zeros(q.n)
        approx = q.diff_matrix @ q.nodes**k
        assert np.max(np.abs(approx - exact)) <= 1e-12 * max(1.0, np.max(np.abs(exact))) * N


def test_quad_integrate_examples():
    q = build_lgl(2)
    assert abs(quad_integrate(q, q.nodes**3)) <= 1e-15
    assert quad_integrate(q, q.nodes**2) == pytest.approx(2 / 3, abs=1e-15)
    assert abs(quad_integrate(q, q.nodes**4) - 2 / 5) > 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 16))
def test_quadrature_exact_below_2n(N):
    q = build_lgl(N)
    assert max(monomial_defect(q, k) for k in range(2 * N)) <= 1e-12


@pytest.mark.parametrize("N", range(1, 17))
def test_quadrature_inexact_for_square_of_legendre(N):
    # P_N^2 has degree 2N: exact integral 2/(2N+1), LGL gives 2/N since P_N(s_j)^2 w_j = 2/(N(N+1))
    q = build_lgl(N)
    P, _ = legendre_eval(N, q.nodes)
    approx = quad_integrate(q, P**2)
    assert approx == pytest.approx(2.0 / N, rel=1e-12)
    assert abs(approx - 2.0 / (2 * N + 1)) > 1e-6


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_sbp_on_polynomial_vectors(N, seed):
    q = build_lgl(N)
    r = np.random.default_rng(seed)
    U = nppoly.polyval(q.nodes, r.standard_normal(N + 1))
    V = nppoly.polyval(q.nodes, r.standard_normal(N + 1))
    D, w = q.diff_matrix, q.weights
    lhs = np.sum(U * (D @ V) * w) + np.sum((D @ U) * V * w)
    boundary = U[-1] * V[-1] - U[0] * V[0]
    scale = max(1.0, np.max(np.abs(U)) * np.max(np.abs(V)))
    assert abs(lhs - boundary) <= 1e-12 * scale * N


def test_dump_csv_roundtrip(tmp_path):
    q = build_lgl(4)
    path = tmp_path / "lgl.csv"
    dump_csv(q, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "s,w"
    table = np.array([[float(v) for v in line.split(",")] for line in lines[1:q.n + 1]])
    assert np.array_equal(table[:, 0], q.nodes) and np.array_equal(table[:, 1], q.weights)
    D = np.array([[float(v) for v in line.split(",")] for line in lines[q.n + 2:]])
    assert np.array_equal(D, q.diff_matrix)

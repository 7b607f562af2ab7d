import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitdg import calculus as calc
from splitdg.quadrature import build_lgl, lagrange_eval
from splitdg.verify import curl_integral_defect, gradient_integral_defect

small_degree = st.integers(1, 8)
seeds = st.integers(0, 2**32 - 1)


def random_poly_field(q, rng, degree=None):
    """Random polynomial of total per-direction degree <= ``degree`` sampled at the nodes."""
    degree = q.degree if degree is None else degree
    c = rng.standard_normal((degree + 1,) * 3)
    xi, eta, zeta = calc.tensor_grid(q)
    V = np.polynomial.polynomial.polyval3d(xi, eta, zeta, c)
    return V


def test_interpolate_examples():
    q = build_lgl(3)
    assert np.array_equal(calc.interpolate(lambda x, y, z: 1.0, q), np.ones((4, 4, 4)))
    q2 = build_lgl(2)
    s = q2.nodes
    assert np.allclose(calc.interpolate(lambda x, y, z: x * y, q2), np.einsum("i,j,k->ijk", s, s, np.ones(3)))


def test_interpolation_aliasing_off_node(rng):
    N = 4
    q = build_lgl(N)
    U = calc.interpolate(lambda x, y, z: x ** (N + 1), q)
    pts = rng.uniform(-1, 1, (10, 3))
    # tensor expansion with lagrange_eval as the oracle evaluator
    vals = np.array([sum(U[i, j, k] * lagrange_eval(q, i, p[0]) * lagrange_eval(q, j, p[1])
                         * lagrange_eval(q, k, p[2])
                         for i in range(q.n) for j in range(q.n) for k in range(q.n)) for p in pts])
    assert np.allclose(calc.evaluate(U, q, pts[:, 0], pts[:, 1], pts[:, 2]), vals, atol=1e-12)
    assert np.max(np.abs(vals - pts[:, 0] ** (N + 1))) > 1e-3


def test_interpolate_reproduces_polynomials(rng):
    q = build_lgl(5)
    c = rng.standard_normal((6, 6, 6))
    U = calc.interpolate(lambda x, y, z: np.polynomial.polynomial.polyval3d(x, y, z, c), q)
    pts = rng.uniform(-1, 1, (20, 3))
    exact = np.polynomial.polynomial.polyval3d(pts[:, 0], pts[:, 1], pts[:, 2], c)
    assert np.allclose(calc.evaluate(U, q, *pts.T), exact, atol=1e-11 * np.max(np.abs(c)) * 20)


def test_gradient_examples():
    q = build_lgl(2)
    xi, eta, zeta = calc.tensor_grid(q)
    g = calc.gradient(xi, q)
    assert np.allclose(g[0], 1) and np.allclose(g[1:], 0, atol=1e-14)
    g = calc.gradient(xi**2 * eta, q)
    assert np.allclose(g[0], 2 * xi * eta, atol=1e-14)
    assert np.allclose(g[1], xi**2, atol=1e-14)
    assert np.max(np.abs(calc.gradient(np.full(xi.shape, 3.7), q))) <= 1e-13


def test_divergence_examples():
    q = build_lgl(3)
    xi, eta, zeta = calc.tensor_grid(q)
    assert np.allclose(calc.divergence(np.stack([xi, eta, zeta]), q), 3.0, atol=1e-13)
    assert np.allclose(calc.divergence(np.stack([eta, zeta, xi]), q), 0.0, atol=1e-13)
    zero = np.zeros_like(xi)
    assert np.allclose(calc.divergence(np.stack([xi**2, zero, zero]), q), 2 * xi, atol=1e-13)


def test_curl_examples(rng):
    q = build_lgl(4)
    xi, eta, zeta = calc.tensor_grid(q)
    zero = np.zeros_like(xi)
    c = calc.curl(np.stack([zero, zero, xi * eta]), q)
    assert np.allclose(c, np.stack([xi, -eta, zero]), atol=1e-13)
    U = random_poly_field(q, rng)
    assert np.max(np.abs(calc.curl(calc.gradient(U, q), q))) <= 1e-12 * np.max(np.abs(U)) * 10
    assert np.max(np.abs(calc.curl(np.ones((3,) + xi.shape), q))) <= 1e-13


def test_laplacian_of_quadratic():
    q = build_lgl(3)
    xi, eta, zeta = calc.tensor_grid(q)
    assert np.allclose(calc.laplacian(xi**2 + 2 * eta**2 - zeta**2, q), 4.0, atol=1e-12)


def test_inner_product_examples():
    q = build_lgl(2)
    xi, eta, zeta = calc.tensor_grid(q)
    ones = np.ones_like(xi)
    assert calc.inner_product(ones, ones, q) == pytest.approx(8.0, abs=1e-14)
    l1 = calc.interpolate(lambda x, y, z: lagrange_eval(q, 1, x.ravel()).reshape(x.shape), q)
    l2 = calc.interpolate(lambda x, y, z: lagrange_eval(q, 2, x.ravel()).reshape(x.shape), q)
    assert calc.inner_product(l1, l2, q) == pytest.approx(0.0, abs=1e-15)
    assert calc.inner_product(xi, xi, q) == pytest.approx(8 / 3, abs=1e-14)
    with pytest.raises(ValueError):
        calc.inner_product(xi, np.ones((2, 2, 2)), q)


def test_inner_product_state_fields(rng):
    q = build_lgl(3)
    F = rng.standard_normal((4, 4, 4, 2))
    G = rng.standard_normal((4, 4, 4, 2))
    assert calc.inner_product(F, G, q) == pytest.approx(
        calc.inner_product(F[..., 0], G[..., 0], q) + calc.inner_product(F[..., 1], G[..., 1], q))


@settings(max_examples=30, deadline=None)
@given(small_degree, seeds)
def test_inner_product_symmetric_bilinear(N, seed):
    q = build_lgl(N)
    r = np.random.default_rng(seed)
    f, g, h = (r.standard_normal((q.n,) * 3) for _ in range(3))
    a = r.standard_normal()
    assert calc.inner_product(f, g, q) == pytest.approx(calc.inner_product(g, f, q), abs=1e-12)
    lhs = calc.inner_product(a * f + h, g, q)
    rhs = a * calc.inner_product(f, g, q) + calc.inner_product(h, g, q)
    assert lhs == pytest.approx(rhs, abs=1e-11 * (1 + abs(a)))


def test_vector_inner_product_examples():
    q = build_lgl(2)
    xi, eta, zeta = calc.tensor_grid(q)
    zero, one = np.zeros_like(xi), np.ones_like(xi)
    F = np.stack([one, zero, zero])
    G = np.stack([zero, one, zero])
    assert calc.vector_inner_product(F, F, q) == pytest.approx(8.0)
    assert calc.vector_inner_product(F, G, q) == 0.0
    X = np.stack([xi, eta, zeta])
    assert calc.vector_inner_product(X, X, q) == pytest.approx(8.0, abs=1e-14)


def test_surface_integral_examples():
    q = build_lgl(3)
    xi, eta, zeta = calc.tensor_grid(q)
    zero, one = np.zeros_like(xi), np.ones_like(xi)
    assert calc.flux_surface_integral(np.stack([one, zero, zero]), q) == pytest.approx(0.0, abs=1e-14)
    assert calc.flux_surface_integral(np.stack([xi, zero, zero]), q) == pytest.approx(8.0, abs=1e-13)
    # per-face data with sign handling done by surface_integral
    F = np.stack([xi, zero, zero])
    faces = np.stack([calc.face_trace(F[d], d, s) for d in range(3) for s in (0, 1)])
    assert calc.surface_integral(faces, q) == pytest.approx(8.0, abs=1e-13)
    assert np.allclose(calc.surface_normal_integral(one, q), 0.0, atol=1e-14)
    with pytest.raises(ValueError):
        calc.surface_integral(faces[:5], q)


@settings(max_examples=40, deadline=None)
@given(small_degree, seeds)
def test_dxgl_dgl_random_fields(N, seed):
    q = build_lgl(N)
    r = np.random.default_rng(seed)
    F = r.standard_normal((3,) + (q.n,) * 3)
    V = r.standard_normal((q.n,) * 3)
    assert calc.dxgl_defect(F, V, q) <= 1e-12
    assert calc.dgl_defect(F, q) <= 1e-12
    # V = 1 reduces the extended law to the plain law
    assert calc.dxgl_defect(F, np.ones_like(V), q) <= 1e-13
    assert calc.dxgl_defect(np.zeros_like(F), V, q) == 0.0


@settings(max_examples=40, deadline=None)
@given(small_degree, seeds)
def test_greens_identities_random(N, seed):
    q = build_lgl(N)
    r = np.random.default_rng(seed)
    Phi, V = r.standard_normal((2,) + (q.n,) * 3)
    first, second = calc.greens_defects(Phi, V, q)
    assert first <= 1e-12 and second <= 1e-12
    assert calc.greens_defects(Phi, Phi, q)[1] == pytest.approx(0.0, abs=1e-15)


def test_greens_first_linear_phi_matches_dgl():
    q = build_lgl(4)
    xi, eta, zeta = calc.tensor_grid(q)
    Phi = 2 * xi - eta + 0.5 * zeta
    first, _ = calc.greens_defects(Phi, np.ones_like(xi), q)
    assert first <= 1e-13
    assert calc.dgl_defect(calc.gradient(Phi, q), q) <= 1e-13


@settings(max_examples=30, deadline=None)
@given(small_degree, seeds)
def test_gradient_and_curl_integral_identities(N, seed):
    q = build_lgl(N)
    r = np.random.default_rng(seed)
    assert gradient_integral_defect(r.standard_normal((q.n,) * 3), q) <= 1e-12
    assert curl_integral_defect(r.standard_normal((3,) + (q.n,) * 3), q) <= 1e-12


def test_aliasing_defect_examples():
    q = build_lgl(2)
    xi, eta, zeta = calc.tensor_grid(q)
    assert calc.aliasing_defect(xi, eta, q) <= 1e-13
    assert calc.aliasing_defect(np.full_like(xi, 2.0), xi**2 + eta, q) <= 1e-13


@pytest.mark.parametrize("N", range(1, 9))
def test_aliasing_witness_against_exact_projection(N):
    # oracle: the nodal product rule error for U = V = xi^N is d/dxi I(xi^2N) - 2N xi^(2N-1),
    # with I the degree-N interpolant built from numpy polynomial fitting
    q = build_lgl(N)
    xi, _, _ = calc.tensor_grid(q)
    s = q.nodes
    interp = np.polynomial.Polynomial.fit(s, s ** (2 * N), N, domain=[-1, 1], window=[-1, 1])
    expected = np.max(np.abs(interp.deriv()(s) - 2 * N * s ** (2 * N - 1)))
    defect = calc.aliasing_defect(xi**N, xi**N, q)
    assert defect == pytest.approx(expected, rel=1e-8, abs=1e-12)
    assert defect > 1e-6


def test_field_shape_checks():
    q = build_lgl(2)
    with pytest.raises(ValueError):
        calc.gradient(np.zeros((4, 4, 4)), q)
    with pytest.raises(ValueError):
        calc.divergence(np.zeros((2, 3, 3, 3)), q)
    with pytest.raises(ValueError):
        calc.curl(np.zeros((2, 3, 3, 3)), q)

"""Tensor-product spectral calculus on the reference cube [-1, 1]^3.

Nodal field conventions (``n = N + 1``):

* scalar field ``U[i, j, k]`` with ``i, j, k`` indexing ``xi, eta, zeta``;
* vector field ``F[m, i, j, k]``, ``m`` the reference direction;
* state field ``U[i, j, k, c]`` with ``p`` components;
* state vector field ``F[m, i, j, k, c]``.

Face arrays are ordered as ``FACES``; face ``2*d + s`` is the face
``xi^d = -1`` (``s = 0``) or ``xi^d = +1`` (``s = 1``), with the two remaining
reference coordinates kept in their natural order.
"""

from __future__ import annotations

import numpy as np

from .quadrature import interpolation_matrix

FACES = ("xi-", "xi+", "eta-", "eta+", "zeta-", "zeta+")
FACE_SIGNS = np.array([-1.0, 1.0, -1.0, 1.0, -1.0, 1.0])


def apply_along(A, U, axis):
    """Contract matrix ``A`` with ``U`` along ``axis``: ``sum_i A[n, i] U[.., i, ..]``."""
    return np.moveaxis(np.tensordot(A, U, axes=(1, axis)), 0, axis)


def _check_field(U, q=None):
    # scalar fields are 3-d; state fields carry a trailing component axis
    if U.ndim not in (3, 4):
        raise ValueError(f"expected a nodal scalar or state field, got shape {U.shape}")
    if q is not None and U.shape[:3] != (q.n,) * 3:
        raise ValueError(f"field shape {U.shape} does not match degree {q.degree}")


def volume_weights(q):
    w = q.weights
    return w[:, None, None] * w[None, :, None] * w[None, None, :]


def face_weights(q):
    return np.outer(q.weights, q.weights)


def tensor_grid(q):
    return np.meshgrid(q.nodes, q.nodes, q.nodes, indexing="ij")


def interpolate(f, q):
    """Sample ``f(xi, eta, zeta)`` at the tensor LGL nodes."""
    xi, eta, zeta = tensor_grid(q)
    return np.asarray(f(xi, eta, zeta), dtype=float) * np.ones_like(xi)


def evaluate(U, q, xi, eta, zeta):
    """Evaluate the interpolant of nodal ``U`` at arbitrary points (1-d arrays)."""
    Lx = interpolation_matrix(q, xi)
    Ly = interpolation_matrix(q, eta)
    Lz = interpolation_matrix(q, zeta)
    return np.einsum("ai,aj,ak,ijk...->a...", Lx, Ly, Lz, U)


def partial(U, q, direction):
    """Nodal derivative along reference direction 0, 1 or 2."""
    return apply_along(q.diff_matrix, U, direction)


def gradient(U, q):
    _check_field(U, q)
    return np.stack([partial(U, q, d) for d in range(3)])


def divergence(F, q):
    if F.shape[0] != 3:
        raise ValueError("vector field must have three components")
    return sum(partial(F[d], q, d) for d in range(3))


def curl(F, q):
    if F.shape[0] != 3:
        raise ValueError("vector field must have three components")
    return np.stack([
        partial(F[2], q, 1) - partial(F[1], q, 2),
        partial(F[0], q, 2) - partial(F[2], q, 0),
        partial(F[1], q, 0) - partial(F[0], q, 1),
    ])


def laplacian(U, q):
    return divergence(gradient(U, q), q)


def inner_product(f, g, q):
    """Discrete LGL inner product of two scalar or state fields."""
    f, g = np.asarray(f), np.asarray(g)
    if f.shape != g.shape:
        raise ValueError(f"shape mismatch {f.shape} vs {g.shape}")
    _check_field(f, q)
    w = volume_weights(q)
    if f.ndim == 4:
        return float(np.einsum("ijk,ijkc,ijkc->", w, f, g))
    return float(np.einsum("ijk,ijk,ijk->", w, f, g))


def vector_inner_product(F, G, q):
    F, G = np.asarray(F), np.asarray(G)
    if F.shape != G.shape or F.shape[0] != 3:
        raise ValueError(f"shape mismatch {F.shape} vs {G.shape}")
    return sum(inner_product(F[m], G[m], q) for m in range(3))


def volume_integral(f, q):
    """Quadrature of a scalar or state field over the reference cube."""
    w = volume_weights(q)
    return np.tensordot(w, f, axes=3)


def face_trace(U, direction, side):
    """Values of ``U`` on the face ``xi^direction = -1`` (side 0) or ``+1`` (side 1)."""
    idx = 0 if side == 0 else U.shape[direction] - 1
    return np.take(U, idx, axis=direction)


def face_traces(U):
    """All six face traces of a scalar or state field, ordered as ``FACES``."""
    return np.stack([face_trace(U, d, s) for d in range(3) for s in (0, 1)])


def normal_traces(F):
    """Outward normal component ``F . n`` on each face of the reference cube."""
    return np.stack([FACE_SIGNS[2 * d + s] * face_trace(F[d], d, s)
                     for d in range(3) for s in (0, 1)])


def surface_integral(faces, q):
    """Surface quadrature of per-face data with the outward-normal sign applied.

    ``faces`` holds, for each face in ``FACES`` order, the normal component of
    a vector field along the face's reference direction (e.g. ``F^(1)`` on the
    two ``xi`` faces).  The minus faces are counted with a negative sign.
    """
    faces = np.asarray(faces, dtype=float)
    if faces.shape[0] != 6:
        raise ValueError("surface data must be supplied on all six faces")
    wf = face_weights(q)
    return np.einsum("f,ij,fij...->...", FACE_SIGNS, wf, faces)


def surface_quadrature(faces, q):
    """Plain face quadrature ``sum_f sum_ij w_i w_j g_f`` without sign handling."""
    faces = np.asarray(faces, dtype=float)
    if faces.shape[0] != 6:
        raise ValueError("surface data must be supplied on all six faces")
    return np.einsum("ij,fij...->...", face_weights(q), faces)


def flux_surface_integral(F, q):
    """Closed-surface integral of ``F . n`` for a vector field."""
    return surface_quadrature(normal_traces(F), q)


def surface_normal_integral(V, q):
    """Closed-surface integral of ``V n`` (a 3-vector for scalar ``V``)."""
    traces = face_traces(V)
    wf = face_weights(q)
    return np.array([
        np.einsum("ij,ij...->...", wf, traces[2 * d + 1] - traces[2 * d]) for d in range(3)
    ])


def surface_cross_integral(F, q):
    """Closed-surface integral of ``n x F``."""
    total = np.zeros(3)
    wf = face_weights(q)
    for d in range(3):
        for s in (0, 1):
            normal = np.zeros(3)
            normal[d] = FACE_SIGNS[2 * d + s]
            trace = np.stack([face_trace(F[m], d, s) for m in range(3)], axis=-1)
            total += np.einsum("ij,ijm->m", wf, np.cross(normal, trace))
    return total


def _relative(residual, terms, *inputs):
    """``|residual|`` over the largest term, floored at the product of input max-norms.

    The floor keeps the measure meaningful when every term is at roundoff
    level (e.g. a divergence-free flux).
    """
    floor = float(np.prod([np.max(np.abs(a)) for a in inputs])) if inputs else 0.0
    scale = max(max(abs(t) for t in terms), floor)
    if scale == 0.0:
        return abs(residual)
    return abs(residual) / scale


def dxgl_defect(F, V, q):
    """Relative defect of the discrete extended Gauss law for vector ``F``, scalar ``V``."""
    a = inner_product(divergence(F, q), V, q)
    b = float(surface_quadrature(normal_traces(F) * face_traces(V), q))
    c = vector_inner_product(F, gradient(V, q), q)
    return _relative(a - b + c, (a, b, c), F, V)


def dgl_defect(F, q):
    """Relative defect of the discrete Gauss law ``(div F, 1) = closed-surface F . n``."""
    a = float(volume_integral(divergence(F, q), q))
    b = float(flux_surface_integral(F, q))
    return _relative(a - b, (a, b), F)


def greens_defects(Phi, V, q):
    """Relative defects of the discrete Green's first and second identities."""
    gP, gV = gradient(Phi, q), gradient(V, q)
    lP, lV = divergence(gP, q), divergence(gV, q)
    bP = float(surface_quadrature(normal_traces(gP) * face_traces(V), q))
    bV = float(surface_quadrature(normal_traces(gV) * face_traces(Phi), q))

    a1, a2 = inner_product(lP, V, q), vector_inner_product(gP, gV, q)
    first = _relative(a1 + a2 - bP, (a1, a2, bP), Phi, V)

    c1 = inner_product(lV, Phi, q)
    second = _relative(a1 - c1 - (bP - bV), (a1, c1, bP, bV), Phi, V)
    return first, second


def aliasing_defect(U, V, q):
    """Max-norm failure of the nodal product rule, relative to ``max(1, |U||V|)``."""
    lhs = gradient(U * V, q)
    rhs = U * gradient(V, q) + V * gradient(U, q)
    scale = max(1.0, float(np.max(np.abs(U)) * np.max(np.abs(V))))
    return float(np.max(np.abs(lhs - rhs))) / scale

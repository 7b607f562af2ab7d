"""Legendre-Gauss-Lobatto nodes, weights, Lagrange basis and derivative matrix.

Everything downstream (tensor calculus, metrics, the DG residual) is built on
the summation-by-parts identity

    M D + (M D)^T = B,   M = diag(w),   B = diag(-1, 0, ..., 0, 1),

which holds for the collocation derivative matrix on LGL nodes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NonConvergence

MAX_DEGREE = 64


def legendre_eval(N, x):
    """Return ``(P_N(x), P_N'(x))`` by the three-term recurrence.

    ``x`` may be a scalar or an array.
    """
    x = np.asarray(x, dtype=float)
    if N == 0:
        return np.ones_like(x)[()], np.zeros_like(x)[()]
    p_prev, p = np.ones_like(x), x.copy()
    dp_prev, dp = np.zeros_like(x), np.ones_like(x)
    for k in range(2, N + 1):
        p_next = ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
        dp_next = dp_prev + (2 * k - 1) * p
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p[()], dp[()]


def _lgl_interior_nodes(N, tol=1e-15, max_iter=100):
    # roots of f(x) = (1 - x^2) P_N'(x); by Legendre's equation f'(x) = -N(N+1) P_N(x)
    x = -np.cos(np.pi * np.arange(1, N) / N)
    nn1 = N * (N + 1)

    def resid(z):
        p, dp = legendre_eval(N, z)
        return (1.0 - z * z) * dp, p

    f, p = resid(x)
    for _ in range(max_iter):
        step = f / (nn1 * p)
        lam = np.ones_like(x)
        for _ in range(30):
            trial = x + lam * step
            f_trial, p_trial = resid(trial)
            worse = np.abs(f_trial) > np.abs(f) + 1e-15
            if not worse.any():
                break
            lam = np.where(worse, 0.5 * lam, lam)
        x, f, p = trial, f_trial, p_trial
        if np.all(np.abs(step) < tol) or np.all(np.abs(f) < tol):
            return x
    raise NonConvergence(f"LGL Newton iteration did not converge for N={N}")


@dataclass(frozen=True, eq=False)
class Quadrature1D:
    """LGL rule of degree ``N`` with its collocation operators."""

    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    diff_matrix: np.ndarray
    bary_weights: np.ndarray

    @property
    def n(self):
        return self.degree + 1

    @property
    def mass(self):
        return np.diag(self.weights)

    @property
    def boundary_matrix(self):
        B = np.zeros((self.n, self.n))
        B[0, 0], B[-1, -1] = -1.0, 1.0
        return B


def differentiation_matrix(q):
    """Collocation derivative matrix ``D[n, i] = l_i'(s_n)``.

    Off-diagonal entries use the barycentric formula; the diagonal is the
    negative row sum so that constants are differentiated to zero exactly.
    """
    s, w = q.nodes, q.bary_weights
    diff = s[:, None] - s[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def _bary_weights(s):
    diff = s[:, None] - s[None, :]
    np.fill_diagonal(diff, 1.0)
    # scale differences to keep the products O(1) for large N
    diff = diff * (len(s) / 4.0)
    w = 1.0 / np.prod(diff, axis=1)
    return w / np.max(np.abs(w))


@lru_cache(maxsize=None)
def build_lgl(N):
    if not 1 <= N <= MAX_DEGREE:
        raise ValueError(f"degree N must lie in [1, {MAX_DEGREE}], got {N}")
    s = np.empty(N + 1)
    s[0], s[-1] = -1.0, 1.0
    if N > 1:
        s[1:-1] = _lgl_interior_nodes(N)
    s = 0.5 * (s - s[::-1])
    p, _ = legendre_eval(N, s)
    w = 2.0 / (N * (N + 1) * p**2)
    bw = _bary_weights(s)
    for a in (s, w, bw):
        a.setflags(write=False)
    q = Quadrature1D(N, s, w, np.empty((0, 0)), bw)
    D = differentiation_matrix(q)
    D.setflags(write=False)
    return Quadrature1D(N, s, w, D, bw)


def interpolation_matrix(q, x):
    """Matrix ``L[a, j] = l_j(x_a)`` in barycentric form (exact at nodes)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    diff = x[:, None] - q.nodes[None, :]
    exact = diff == 0.0
    diff = np.where(exact, 1.0, diff)
    t = q.bary_weights[None, :] / diff
    L = t / t.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    L[hit] = exact[hit].astype(float)
    return L


def lagrange_eval(q, j, x):
    """Value of the ``j``-th Lagrange basis polynomial at ``x``."""
    if not 0 <= j <= q.degree:
        raise IndexError(j)
    out = interpolation_matrix(q, x)[:, j]
    return out[0] if np.ndim(x) == 0 else out


def quad_integrate(q, samples):
    return float(np.dot(q.weights, samples))


def sbp_defect(q):
    MD = q.weights[:, None] * q.diff_matrix
    return float(np.max(np.abs(MD + MD.T - q.boundary_matrix)))


def dump_csv(q, path):
    """Write nodes/weights, then the derivative matrix row-major, as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "w"])
        for s, w in zip(q.nodes, q.weights):
            writer.writerow([f"{s:.17g}", f"{w:.17g}"])
        writer.writerow([f"D{j}" for j in range(q.n)])
        for row in q.diff_matrix:
            writer.writerow([f"{v:.17g}" for v in row])

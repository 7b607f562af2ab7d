"""Linear symmetric hyperbolic systems, characteristic splitting and fluxes.

A system ``u_t + sum_m d/dx_m (A^(m)(x) u) = 0`` is described by evaluators
that take physical points ``x[..., 3]``:

* ``coefficients(x) -> (..., 3, p, p)``
* ``divergence(x) -> (..., p, p)``, the analytic ``sum_m dA^(m)/dx_m``
* ``eigen(alpha, x) -> (R, lam, Rinv)`` with ``sum_m alpha_m A^(m) = R diag(lam) Rinv``
* ``boundary(x, t) -> (..., p)``, exterior data for characteristic boundaries
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import calculus as calc


def zero_boundary(p):
    def g(x, t):
        return np.zeros(np.shape(x)[:-1] + (p,))
    return g


@dataclass(frozen=True, eq=False)
class HyperbolicSystem:
    name: str
    p: int
    coefficients: Callable
    divergence: Callable
    eigen: Callable
    max_speed: Callable
    boundary: Callable = None
    # vector potential psi with velocity = curl psi (scalar advection only)
    potential: Optional[Callable] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.boundary is None:
            object.__setattr__(self, "boundary", zero_boundary(self.p))

    def with_boundary(self, g):
        return replace(self, boundary=g)

    def normal_matrix(self, alpha, x):
        return np.einsum("...m,...mij->...ij", alpha, self.coefficients(x))


@dataclass(frozen=True, eq=False)
class NormalSplit:
    """Characteristic splitting of a (face-weighted) normal coefficient matrix."""

    An: np.ndarray
    Aplus: np.ndarray
    Aminus: np.ndarray
    R: np.ndarray
    lam: np.ndarray
    Rinv: np.ndarray

    @property
    def Aabs_minus(self):
        return -self.Aminus

    @property
    def Aabs(self):
        return self.Aplus - self.Aminus

    def sqrt_abs_minus(self):
        root = np.sqrt(np.maximum(-self.lam, 0.0))
        return _reassemble(self.R, root, self.Rinv)


@dataclass(frozen=True, eq=False)
class ContravariantCoefficients:
    """Nodal ``A~^i`` (shape ``(3, n, n, n, p, p)``) and their discrete divergence."""

    At: np.ndarray
    divA: np.ndarray


def _reassemble(R, lam, Rinv):
    return np.einsum("...ik,...k,...kj->...ij", R, lam, Rinv)


def _mv(A, u):
    return np.einsum("...ij,...j->...i", A, u)


def _dot(u, v):
    return np.einsum("...i,...i->...", u, v)


def normal_split(system, alpha, x, normal_matrix=None):
    """Split ``A . alpha`` into ``A+ + A-`` using the system's eigenvectors.

    ``alpha`` need not be a unit vector; face-weighted contravariant normals
    are passed directly.  When ``normal_matrix`` is given (the nodal
    ``A~ . n`` actually used in the fluxes) the eigenvalues are taken as the
    diagonal of ``Rinv @ normal_matrix @ R`` so the split reproduces that
    matrix.
    """
    R, lam, Rinv = system.eigen(alpha, x)
    if normal_matrix is None:
        An = _reassemble(R, lam, Rinv)
    else:
        An = np.asarray(normal_matrix, dtype=float)
        lam = np.einsum("...ki,...ij,...jk->...k", Rinv, An, R)
    lam_plus = 0.5 * (lam + np.abs(lam))
    lam_minus = 0.5 * (lam - np.abs(lam))
    return NormalSplit(An, _reassemble(R, lam_plus, Rinv), _reassemble(R, lam_minus, Rinv),
                       R, lam, Rinv)


def contravariant_flux(coeffs, U):
    """``F~^i = A~^i U`` at every node; returns shape ``(3, ..., p)``."""
    if coeffs.At.shape[-1] != U.shape[-1]:
        raise ValueError("state dimension does not match the coefficients")
    return np.einsum("d...ij,...j->d...i", coeffs.At, U)


def numerical_flux(UL, UR, split, sigma):
    """Central flux plus ``sigma``-weighted upwind dissipation."""
    if not 0.0 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [0, 1]")
    return 0.5 * _mv(split.An, UL + UR) - 0.5 * sigma * _mv(split.Aabs, UR - UL)


def interface_dissipation(UL, UR, split, sigma):
    """``F*^T [U] - 1/2 [(F . n)^T U]`` with ``[V] = V_R - V_L``."""
    Fs = numerical_flux(UL, UR, split, sigma)
    jump = UR - UL
    return _dot(Fs, jump) - 0.5 * (_dot(_mv(split.An, UR), UR) - _dot(_mv(split.An, UL), UL))


def boundary_exterior_state(U, split, g):
    """Exterior state: outgoing characteristics from ``U``, incoming from ``g``."""
    w = _mv(split.Rinv, U)
    wg = _mv(split.Rinv, g)
    return _mv(split.R, np.where(split.lam < 0.0, wg, w))


def boundary_energy(U, g, split):
    """``1/2 U^T A+ U + 1/2 |sqrt|A-| (U - g)|^2 - 1/2 g^T |A-| g`` nodewise."""
    S = split.sqrt_abs_minus()
    d = _mv(S, U - g)
    return 0.5 * _dot(U, _mv(split.Aplus, U)) + 0.5 * _dot(d, d) \
        - 0.5 * _dot(g, _mv(split.Aabs_minus, g))


# ----------------------------------------------------------------------------
# contravariant coefficients on an element

def _coeffs_from_potential(system, geom, q):
    psi = system.potential(geom.x)
    psi_cov = np.einsum("...m,d...m->d...", psi, geom.a_cov)
    At = calc.curl(psi_cov, q)
    return At[..., None, None]


def contravariant_coeffs(system, geom, q):
    """Nodal ``A~^i = Ja^i . A(X)`` and ``div_xi`` of their interpolant.

    For advection built from a vector potential the contravariant velocity is
    instead the discrete reference curl of the potential's covariant
    components, so its discrete divergence vanishes to roundoff.
    """
    if geom.x.ndim == 5:
        parts = [contravariant_coeffs(system, geom.element(r), q) for r in range(geom.x.shape[0])]
        return ContravariantCoefficients(np.stack([c.At for c in parts]),
                                         np.stack([c.divA for c in parts]))
    if system.potential is not None:
        At = _coeffs_from_potential(system, geom, q)
    else:
        At = np.einsum("d...m,...mij->d...ij", geom.Ja, system.coefficients(geom.x))
    divA = sum(calc.partial(At[d], q, d) for d in range(3))
    return ContravariantCoefficients(At, divA)


# ----------------------------------------------------------------------------
# built-in systems

def make_advection(velocity, divergence=None, potential=None, name="advection"):
    """Scalar advection ``u_t + div(a u) = 0`` with velocity ``a(x)``."""

    def coefficients(x):
        return velocity(x)[..., :, None, None]

    def div(x):
        if divergence is None:
            return np.zeros(np.shape(x)[:-1] + (1, 1))
        return np.asarray(divergence(x), dtype=float)[..., None, None] * np.ones(np.shape(x)[:-1] + (1, 1))

    def eigen(alpha, x):
        lam = _dot(alpha, velocity(x))[..., None]
        one = np.ones(lam.shape + (1,))
        return one, lam, one

    def max_speed(x):
        return np.linalg.norm(velocity(x), axis=-1)

    return HyperbolicSystem(name, 1, coefficients, div, eigen, max_speed, potential=potential)


def make_constant_advection(a):
    a = np.asarray(a, dtype=float)

    def velocity(x):
        return np.broadcast_to(a, np.shape(x)[:-1] + (3,))

    sys = make_advection(velocity, name="advection")
    return replace(sys, params={"velocity": "constant", "a": a.tolist()})


def make_divergence_free_advection(potential, velocity):
    """Advection with ``a = curl(psi)``; the caller supplies both evaluators."""
    sys = make_advection(velocity, potential=potential)
    return sys


def cellular_flow(amplitude=1.0, weights=(1.0, 1.0, 1.0), lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0)):
    """Divergence-free cellular velocity and its vector potential on a box.

    ``psi = (amplitude / pi) (c1 s_y s_z, c2 s_z s_x, c3 s_x s_y)`` with
    ``s_m = sin(pi (x_m - lo_m) / L_m)``; the returned velocity is its exact
    curl, which is tangential to the faces of the box.
    """
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    L = hi - lo
    c = np.asarray(weights, float)
    k = amplitude / np.pi

    def potential(x):
        s = np.sin(np.pi * (x - lo) / L)
        return k * np.stack([c[0] * s[..., 1] * s[..., 2], c[1] * s[..., 2] * s[..., 0],
                             c[2] * s[..., 0] * s[..., 1]], axis=-1)

    def velocity(x):
        xh = np.pi * (x - lo) / L
        s, co = np.sin(xh), np.cos(xh)
        dx = np.pi / L
        # d psi_i / d x_j
        ax = c[2] * s[..., 0] * co[..., 1] * dx[1] - c[1] * co[..., 2] * dx[2] * s[..., 0]
        ay = c[0] * s[..., 1] * co[..., 2] * dx[2] - c[2] * co[..., 0] * dx[0] * s[..., 1]
        az = c[1] * s[..., 2] * co[..., 0] * dx[0] - c[0] * co[..., 1] * dx[1] * s[..., 2]
        return k * np.stack([ax, ay, az], axis=-1)

    return potential, velocity


def make_cellular_advection(amplitude=1.0, weights=(1.0, 1.0, 1.0), lo=(0.0, 0.0, 0.0),
                            hi=(1.0, 1.0, 1.0)):
    potential, velocity = cellular_flow(amplitude, weights, lo, hi)
    sys = make_divergence_free_advection(potential, velocity)
    return replace(sys, params={"velocity": "cellular", "amplitude": amplitude,
                                "weights": list(weights)})


def _unit_and_norm(alpha):
    norm = np.linalg.norm(alpha, axis=-1)
    return alpha / norm[..., None], norm


def _tangents(nhat):
    e = np.zeros_like(nhat)
    use_x = np.abs(nhat[..., 0]) < 0.9
    e[..., 0] = np.where(use_x, 1.0, 0.0)
    e[..., 1] = np.where(use_x, 0.0, 1.0)
    t1 = e - _dot(e, nhat)[..., None] * nhat
    t1 /= np.linalg.norm(t1, axis=-1)[..., None]
    return t1, np.cross(nhat, t1)


def make_acoustics(c=1.0):
    """Symmetric linear acoustics, state ``(u, v, w, p)``, sound speed ``c``."""
    if c <= 0:
        raise ValueError("sound speed must be positive")
    A = np.zeros((3, 4, 4))
    for m in range(3):
        A[m, m, 3] = A[m, 3, m] = c

    def coefficients(x):
        return np.broadcast_to(A, np.shape(x)[:-1] + (3, 4, 4))

    def divergence(x):
        return np.zeros(np.shape(x)[:-1] + (4, 4))

    def eigen(alpha, x):
        alpha = np.asarray(alpha, dtype=float)
        nhat, norm = _unit_and_norm(alpha)
        t1, t2 = _tangents(nhat)
        shape = nhat.shape[:-1]
        R = np.zeros(shape + (4, 4))
        s = 1.0 / np.sqrt(2.0)
        R[..., :3, 0] = s * nhat
        R[..., 3, 0] = s
        R[..., :3, 1] = s * nhat
        R[..., 3, 1] = -s
        R[..., :3, 2] = t1
        R[..., :3, 3] = t2
        lam = np.zeros(shape + (4,))
        lam[..., 0] = c * norm
        lam[..., 1] = -c * norm
        return R, lam, np.swapaxes(R, -1, -2)

    def max_speed(x):
        return np.full(np.shape(x)[:-1], float(c))

    return HyperbolicSystem("acoustics", 4, coefficients, divergence, eigen, max_speed,
                            params={"c": float(c)})


def symmetry_defect(system, x):
    A = system.coefficients(x)
    return float(np.max(np.abs(A - np.swapaxes(A, -1, -2))))


def eigen_defect(system, alpha, x):
    R, lam, Rinv = system.eigen(alpha, x)
    An = system.normal_matrix(alpha, x)
    scale = max(1.0, float(np.max(np.abs(An))))
    return float(np.max(np.abs(_reassemble(R, lam, Rinv) - An))) / scale

"""Multi-element DGSEM and split-form residuals with energy diagnostics.

State arrays have shape ``(K, n, n, n, p)``.  With a collocated LGL basis the
mass matrix is diagonal, so every form is assembled nodewise as
``J dU/dt = rhs`` where ``rhs`` collects volume terms and face terms lifted by
``1 / w_end`` onto the face nodes.

Forms (``F~ = A~ U``, ``Dw = M^-1 D^T M`` the weak derivative, ``L`` the face
lift of outward face data, ``F.n`` the element's own normal flux):

* ``DGSEM``: ``Dw . F~ - L(F*)``
* ``W``:  ``1/2 (Dw . F~ + A~ . Dw U - div(A~) U) - L(F*)``
* ``S``:  ``-1/2 (D . F~ + A~ . D U + div(A~) U) - L(F* - F.n)``
* ``SC``: ``-D . F~ - 1/2 (A~ . D U + div(A~) U - D . F~) - L(F* - F.n)``
* ``DS``: ``-1/2 (D . F~ - A~ . Dw U + div(A~) U) - L(F* - F.n / 2)``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import calculus as calc
from .system import (boundary_exterior_state, contravariant_coeffs, interface_dissipation,
                     normal_split, numerical_flux)

FORMS = ("DGSEM", "W", "S", "SC", "DS")


def _face_index(d, side, n, lead=(slice(None),)):
    idx = [slice(None)] * 3
    idx[d] = 0 if side == 0 else n - 1
    return tuple(lead) + tuple(idx)


@dataclass(eq=False)
class _FaceGroup:
    elems: np.ndarray
    d: int
    side: int
    x: np.ndarray
    split: object


class DGOperator:
    """Static operator data for a mesh and system: coefficients and face splits."""

    def __init__(self, mesh, system):
        self.mesh = mesh
        self.system = system
        self.q = q = mesh.q
        self.n = q.n
        self.coeffs = contravariant_coeffs(system, mesh.geometry, q)
        w = q.weights
        self.D = np.asarray(q.diff_matrix)
        self.Dw = (self.D.T * w[None, :]) / w[:, None]
        self.w_end = w[-1]
        self.wvol = calc.volume_weights(q)
        self.wface = calc.face_weights(q)
        g = mesh.geometry
        self.J = g.J

        At = self.coeffs.At
        self.interior = []
        for d, (own, nbr) in enumerate(mesh.interior):
            if len(own) == 0:
                self.interior.append(None)
                continue
            An = calc.face_trace(At[own, d], d + 1, 1)
            alpha = calc.face_trace(g.Ja[own, d], d + 1, 1)
            x = calc.face_trace(g.x[own], d + 1, 1)
            split = normal_split(system, alpha, x, normal_matrix=An)
            self.interior.append((own, nbr, split))

        self.boundary = []
        for f, elems in enumerate(mesh.boundary):
            d, side = divmod(f, 2)
            sign = calc.FACE_SIGNS[f]
            An = sign * calc.face_trace(At[elems, d], d + 1, side)
            alpha = sign * calc.face_trace(g.Ja[elems, d], d + 1, side)
            x = calc.face_trace(g.x[elems], d + 1, side)
            split = normal_split(system, alpha, x, normal_matrix=An)
            self.boundary.append(_FaceGroup(elems, d, side, x, split))

    @property
    def p(self):
        return self.system.p

    def _along(self, A, U, d):
        return calc.apply_along(A, U, d + 1)

    def volume_terms(self, U):
        At, divA = self.coeffs.At, self.coeffs.divA
        F = [np.einsum("k...ij,k...j->k...i", At[:, d], U) for d in range(3)]
        out = {
            "divF": sum(self._along(self.D, F[d], d) for d in range(3)),
            "AgradU": sum(np.einsum("k...ij,k...j->k...i", At[:, d], self._along(self.D, U, d))
                          for d in range(3)),
            "divAU": np.einsum("k...ij,k...j->k...i", divA, U),
            "WdivF": sum(self._along(self.Dw, F[d], d) for d in range(3)),
            "WAgradU": sum(np.einsum("k...ij,k...j->k...i", At[:, d], self._along(self.Dw, U, d))
                           for d in range(3)),
        }
        return out

    def normal_fluxes(self, U):
        """Each element's own outward ``F~ . n`` on its six faces, ``(K, 6, n, n, p)``."""
        At = self.coeffs.At
        out = []
        for f in range(6):
            d, side = divmod(f, 2)
            An = calc.FACE_SIGNS[f] * calc.face_trace(At[:, d], d + 1, side)
            out.append(np.einsum("k...ij,k...j->k...i", An, calc.face_trace(U, d + 1, side)))
        return np.stack(out, axis=1)

    def face_exchange(self, U, t, sigma):
        K, n, p = U.shape[0], self.n, U.shape[-1]
        fstar = np.zeros((K, 6, n, n, p))
        interior = []
        for d, item in enumerate(self.interior):
            if item is None:
                interior.append(None)
                continue
            own, nbr, split = item
            UL = calc.face_trace(U[own], d + 1, 1)
            UR = calc.face_trace(U[nbr], d + 1, 0)
            Fs = numerical_flux(UL, UR, split, sigma)
            fstar[own, 2 * d + 1] = Fs
            fstar[nbr, 2 * d] = -Fs
            interior.append((UL, UR, Fs))
        boundary = []
        for grp in self.boundary:
            Ui = calc.face_trace(U[grp.elems], grp.d + 1, grp.side)
            gval = self.system.boundary(grp.x, t)
            ext = boundary_exterior_state(Ui, grp.split, gval)
            # physical boundaries always use the fully upwind flux
            Fs = numerical_flux(Ui, ext, grp.split, 1.0)
            fstar[grp.elems, 2 * grp.d + grp.side] = Fs
            boundary.append((Ui, ext, Fs, gval))
        return FaceExchange(interior, boundary, fstar)

    def lift(self, G):
        """Map outward face data ``G[K, 6, n, n, p]`` to ``G / w_end`` on the face nodes."""
        out = np.zeros((G.shape[0],) + (self.n,) * 3 + (G.shape[-1],))
        for f in range(6):
            d, side = divmod(f, 2)
            out[_face_index(d, side, self.n)] += G[:, f] / self.w_end
        return out

    def rhs(self, U, t, form, sigma, faces=None):
        """``J dU/dt`` for the requested form."""
        if form not in FORMS:
            raise ValueError(f"unknown form {form!r}")
        if faces is None:
            faces = self.face_exchange(U, t, sigma)
        v = self.volume_terms(U)
        Fs = faces.fstar
        if form == "DGSEM":
            return v["WdivF"] - self.lift(Fs)
        if form == "W":
            return 0.5 * (v["WdivF"] + v["WAgradU"] - v["divAU"]) - self.lift(Fs)
        Fn = self.normal_fluxes(U)
        if form == "S":
            return -0.5 * (v["divF"] + v["AgradU"] + v["divAU"]) - self.lift(Fs - Fn)
        if form == "SC":
            corr = 0.5 * (v["AgradU"] + v["divAU"] - v["divF"])
            return -v["divF"] - corr - self.lift(Fs - Fn)
        return -0.5 * (v["divF"] - v["WAgradU"] + v["divAU"]) - self.lift(Fs - 0.5 * Fn)

    def residual(self, U, t, form, sigma, faces=None):
        return self.rhs(U, t, form, sigma, faces) / self.J[..., None]

    def boundary_flux(self, faces):
        """``sum over boundary faces of the surface quadrature of F*`` (p-vector)."""
        total = np.zeros(self.p)
        for (_, _, Fs, _) in faces.boundary:
            total += np.einsum("ij,kijc->c", self.wface, Fs)
        return total

    def energy_inflow(self, faces):
        """``sum over boundary faces of the surface quadrature of g^T |A-| g``."""
        total = 0.0
        for grp, (_, _, _, g) in zip(self.boundary, faces.boundary):
            Ag = np.einsum("k...ij,k...j->k...i", grp.split.Aabs_minus, g)
            total += float(np.einsum("ij,kijc,kijc->", self.wface, Ag, g))
        return total


@dataclass(eq=False)
class FaceExchange:
    """Face traces and numerical fluxes.

    ``interior[d] = (UL, UR, F*)`` per direction (``None`` if absent);
    ``boundary[f] = (U, U_ext, F*, g)`` per boundary face group; ``fstar`` holds
    the outward numerical flux seen by every element on each local face.
    """

    interior: list
    boundary: list
    fstar: np.ndarray


@dataclass(eq=False)
class SolverState:
    op: DGOperator
    U: np.ndarray
    t: float = 0.0
    form: str = "DS"
    sigma: float = 1.0
    boundary_flux: np.ndarray = None
    energy_inflow: float = 0.0

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown form {self.form!r}")
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError("sigma must lie in [0, 1]")
        if self.t < 0:
            raise ValueError("time must be non-negative")
        n, K = self.op.n, self.op.mesh.n_elements
        expected = (K, n, n, n, self.op.p)
        self.U = np.asarray(self.U, dtype=float)
        if self.U.shape != expected:
            raise ValueError(f"state shape {self.U.shape}, expected {expected}")
        if self.boundary_flux is None:
            self.boundary_flux = np.zeros(self.op.p)

    @property
    def mesh(self):
        return self.op.mesh

    @property
    def coeffs(self):
        return self.op.coeffs

    def with_U(self, U, **kw):
        return replace(self, U=np.asarray(U, dtype=float), **kw)


def make_state(mesh, system, U=None, form="DS", sigma=1.0, t=0.0, op=None):
    op = op or DGOperator(mesh, system)
    if U is None:
        U = np.zeros((mesh.n_elements,) + (mesh.q.n,) * 3 + (system.p,))
    return SolverState(op, U, t, form, sigma)


def nodal_values(mesh, func):
    """Evaluate ``func(x) -> (..., p)`` at every node of the mesh."""
    return np.asarray(func(mesh.geometry.x), dtype=float)


def face_exchange(state):
    return state.op.face_exchange(state.U, state.t, state.sigma)


def residual(state, form=None):
    return state.op.residual(state.U, state.t, form or state.form, state.sigma)


def correction_term(state):
    """Aliasing correction as a ``dU/dt`` contribution.

    ``residual(SC) == residual(DGSEM) + correction_term``; this is minus half
    of ``A~ . grad U + div(A~) U - div F~`` divided by ``J``.
    """
    v = state.op.volume_terms(state.U)
    return -0.5 * (v["AgradU"] + v["divAU"] - v["divF"]) / state.op.J[..., None]


def _weighted_sum(op, a, b=None):
    w = op.wvol[None, ..., None] * op.J[..., None]
    if b is None:
        return np.einsum("eijkc->c", w * a)
    return float(np.sum(w * a * b))


def total_energy(state):
    return _weighted_sum(state.op, state.U, state.U)


def semidiscrete_energy_rate(state, form=None):
    return 2.0 * _weighted_sum(state.op, residual(state, form), state.U)


def conserved_integrals(state):
    return _weighted_sum(state.op, state.U)


def boundary_flux_rate(state):
    return state.op.boundary_flux(face_exchange(state))


def conservation_defect(state, form=None):
    """``|d/dt sum int J U + boundary flux|`` relative to ``max(1, |terms|)``."""
    op = state.op
    faces = face_exchange(state)
    dq = _weighted_sum(op, op.residual(state.U, state.t, form or state.form, state.sigma, faces))
    bf = op.boundary_flux(faces)
    scale = max(1.0, float(np.max(np.abs(dq))), float(np.max(np.abs(bf))))
    return float(np.max(np.abs(dq + bf))) / scale


def gamma_hat(state):
    op = state.op
    M = op.coeffs.divA / op.J[..., None, None]
    return 0.5 * float(np.max(np.linalg.norm(M, ord=2, axis=(-2, -1))))


def energy_budget(state):
    """Face and volume pieces of the semidiscrete energy rate.

    Returns ``boundary = sum over boundary faces of int (F* - F.n/2)^T U``,
    ``interface = sum over interior faces of int F*^T[U] - [(F.n)^T U]/2`` and
    ``volume = sum_r (div(A~) U, U)_N``.  For the DS form (and for DGSEM when
    ``A~`` is constant, without the volume piece) the rate equals
    ``-volume - 2 boundary + 2 interface``.
    """
    op, U = state.op, state.U
    faces = face_exchange(state)
    wf = op.wface
    bnd = 0.0
    for grp, (Ui, _, Fs, _) in zip(op.boundary, faces.boundary):
        Fn = np.einsum("k...ij,k...j->k...i", grp.split.An, Ui)
        bnd += float(np.einsum("ij,kijc,kijc->", wf, Fs - 0.5 * Fn, Ui))
    intf = 0.0
    for item, ex in zip(op.interior, faces.interior):
        if item is None:
            continue
        UL, UR, _ = ex
        diss = interface_dissipation(UL, UR, item[2], state.sigma)
        intf += float(np.einsum("ij,kij->", wf, diss))
    vol = _weighted_sum(op, np.einsum("k...ij,k...j->k...i", op.coeffs.divA, U) / op.J[..., None], U)
    return {"boundary": bnd, "interface": intf, "volume": vol}


def element_surface_energy(state):
    """Per element ``-2 int (F* - F.n/2)^T U dS`` over its own faces, shape ``(K,)``."""
    op, U = state.op, state.U
    faces = face_exchange(state)
    Fn = op.normal_fluxes(U)
    traces = np.stack([calc.face_trace(U, d + 1, s) for d in range(3) for s in (0, 1)], axis=1)
    return -2.0 * np.einsum("ij,kfijc,kfijc->k", op.wface, faces.fstar - 0.5 * Fn, traces)


def l2_error(state, exact):
    """``sqrt((J e, e)_N)`` for ``e = U - exact(x, t)`` summed over elements."""
    err = state.U - nodal_values(state.mesh, lambda x: exact(x, state.t))
    return math.sqrt(_weighted_sum(state.op, err, err))


def rk4_step(state, dt):
    """Classic four-stage Runge-Kutta step; boundary data follow the stage times."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    op, U, t = state.op, state.U, state.t

    def stage(V, tt):
        faces = op.face_exchange(V, tt, state.sigma)
        return (op.residual(V, tt, state.form, state.sigma, faces), op.boundary_flux(faces),
                op.energy_inflow(faces))

    k1, b1, e1 = stage(U, t)
    k2, b2, e2 = stage(U + 0.5 * dt * k1, t + 0.5 * dt)
    k3, b3, e3 = stage(U + 0.5 * dt * k2, t + 0.5 * dt)
    k4, b4, e4 = stage(U + dt * k3, t + dt)
    U_new = U + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    bf = state.boundary_flux + dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
    inflow = state.energy_inflow + dt / 6.0 * (e1 + 2 * e2 + 2 * e3 + e4)
    return replace(state, U=U_new, t=t + dt, boundary_flux=bf, energy_inflow=inflow)


@dataclass
class Diagnostics:
    t: float
    energy: float
    conserved: np.ndarray
    boundary_flux: np.ndarray
    energy_rate: float
    conservation_defect: float
    gamma_hat: float = field(default=0.0)
    energy_inflow: float = field(default=0.0)


def diagnostics(state):
    return Diagnostics(
        t=state.t,
        energy=total_energy(state),
        conserved=conserved_integrals(state),
        boundary_flux=state.boundary_flux.copy(),
        energy_rate=semidiscrete_energy_rate(state),
        conservation_defect=conservation_defect(state),
        gamma_hat=gamma_hat(state),
        energy_inflow=state.energy_inflow,
    )


def stable_dt(mesh, system, cfl):
    """``CFL h_min / ((2N + 1) lambda_max)`` with the wave speed sampled at the nodes."""
    lam = float(np.max(system.max_speed(mesh.geometry.x)))
    if lam <= 0.0:
        lam = 1.0
    return cfl * mesh.h_min / ((2 * mesh.degree + 1) * lam)


def integrate(state, T, dt, output_every=1, callback=None):
    """Advance to ``T`` with fixed steps; returns the final state and diagnostics rows."""
    nsteps = 0 if T <= 0 else max(1, math.ceil(T / dt - 1e-12))
    step = T / nsteps if nsteps else 0.0
    rows = [diagnostics(state)]
    for i in range(1, nsteps + 1):
        state = rk4_step(state, step)
        if i == nsteps:
            state = replace(state, t=float(T))
        if i % output_every == 0 or i == nsteps:
            rows.append(diagnostics(state))
        if callback is not None:
            callback(state)
    return state, rows


@dataclass
class RunResult:
    rows: list
    state: SolverState
    exact: object
    dt: float
    nsteps: int
    gamma_hat: float
    l2_error: float = None


def run(cfg, form=None):
    """Integrate the configured problem from 0 to ``cfg.T``; deterministic given ``cfg``."""
    from .problem import build_problem

    prob = build_problem(cfg)
    state = make_state(prob.mesh, prob.system, prob.U0, form=form or cfg.form, sigma=cfg.sigma)
    dt = cfg.dt if cfg.dt is not None else stable_dt(prob.mesh, prob.system, cfg.cfl)
    nsteps = 0 if cfg.T <= 0 else max(1, math.ceil(cfg.T / dt - 1e-12))
    step = cfg.T / nsteps if nsteps else dt
    every = max(1, round(cfg.output_interval / step)) if cfg.output_interval > 0 else 1
    state, rows = integrate(state, cfg.T, step, every)
    err = l2_error(state, prob.exact) if prob.exact is not None else None
    return RunResult(rows, state, prob.exact, step, nsteps, gamma_hat(state), err)

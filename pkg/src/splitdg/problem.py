"""Build meshes, systems, initial data and exact solutions from a RunConfig."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ValidationError
from .geometry import build_box_mesh
from .system import make_acoustics, make_cellular_advection, make_constant_advection


@dataclass
class Problem:
    mesh: object
    system: object
    U0: np.ndarray
    exact: Optional[Callable] = None


def build_mesh(cfg):
    return build_box_mesh(cfg.lo, cfg.hi, cfg.counts, cfg.warp, cfg.N, cfg.metric)


def build_system(cfg):
    if cfg.system == "acoustics":
        return make_acoustics(cfg.c)
    if cfg.velocity == "cellular":
        return make_cellular_advection(cfg.amplitude, cfg.weights, cfg.lo, cfg.hi)
    return make_constant_advection(cfg.a)


def _profile(cfg):
    """Scalar initial profile ``f(x) -> x.shape[:-1]`` for smooth initial data."""
    lo, hi = np.asarray(cfg.lo), np.asarray(cfg.hi)
    center = np.asarray(cfg.center) if cfg.center is not None else 0.5 * (lo + hi)
    amp = cfg.init_amplitude
    if cfg.initial == "gaussian":
        def f(x):
            r2 = np.sum((x - center) ** 2, axis=-1)
            return amp * np.exp(-r2 / cfg.width**2)
    else:
        k = 2.0 * np.pi * np.asarray(cfg.wavenumber) / (hi - lo)

        def f(x):
            return amp * np.sin(np.einsum("...m,m->...", x - lo, k))
    return f


def build_problem(cfg):
    mesh = build_mesh(cfg)
    system = build_system(cfg)
    p = system.p
    x = mesh.geometry.x
    shape = (mesh.n_elements,) + (mesh.q.n,) * 3 + (p,)
    exact, U0 = None, None

    if cfg.initial == "zero":
        def exact(x, t):
            return np.zeros(np.shape(x)[:-1] + (p,))
    elif cfg.initial == "constant":
        value = np.broadcast_to(np.asarray(cfg.value, dtype=float), (p,))

        def exact(x, t):
            return np.broadcast_to(value, np.shape(x)[:-1] + (p,)).copy()
    elif cfg.initial == "random":
        U0 = np.random.default_rng(cfg.seed).uniform(-1.0, 1.0, shape)
    else:
        f = _profile(cfg)
        if cfg.system == "acoustics":
            # pressure pulse at rest; no closed-form solution is supplied
            U0 = np.zeros(shape)
            U0[..., 3] = f(x)
        elif cfg.velocity == "constant":
            a = np.asarray(cfg.a)

            def exact(x, t):
                return f(x - a * t)[..., None]
        else:
            U0 = f(x)[..., None]

    if U0 is None:
        U0 = exact(x, 0.0)
    if cfg.boundary == "exact":
        if exact is None:
            raise ValidationError("boundary", f"no exact solution for initial = {cfg.initial}")
        system = system.with_boundary(exact)
    return Problem(mesh, system, np.asarray(U0, dtype=float), exact)

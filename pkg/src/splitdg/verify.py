"""Identity suite behind ``splitdg verify``: discrete calculus and metric checks."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import calculus as calc
from .geometry import build_box_mesh, conformity_defect, metric_identity_defect
from .quadrature import build_lgl, quad_integrate, sbp_defect

TOL = 1e-12


@dataclass
class Check:
    name: str
    N: int
    defect: float
    tolerance: float
    passed: bool
    kind: str = "max"  # "max": defect <= tolerance; "min": defect > tolerance (witness)

    def as_dict(self):
        return asdict(self)


def _check(name, N, defect, tol=TOL, kind="max"):
    defect = float(defect)
    ok = defect > tol if kind == "min" else defect <= tol
    return Check(name, N, defect, tol, bool(ok and np.isfinite(defect)), kind)


def monomial_defect(q, k):
    """Relative error of LGL quadrature for ``x**k`` on ``[-1, 1]``."""
    exact = 0.0 if k % 2 else 2.0 / (k + 1)
    approx = quad_integrate(q, q.nodes**k)
    return abs(approx - exact) / max(abs(exact), 1.0)


def _vector_relative(residual, floor, *terms):
    scale = max(floor, *(float(np.max(np.abs(t))) for t in terms))
    err = float(np.max(np.abs(residual)))
    return err / scale if scale > 0 else err


def gradient_integral_defect(V, q):
    """``|(grad V, 1) - closed-surface V n|`` relative to the larger term."""
    a = np.array([calc.volume_integral(g, q) for g in calc.gradient(V, q)])
    b = calc.surface_normal_integral(V, q)
    return _vector_relative(a - b, float(np.max(np.abs(V))), a, b)


def curl_integral_defect(F, q):
    """``|(curl F, 1) - closed-surface n x F|`` relative to the larger term."""
    a = np.array([calc.volume_integral(c, q) for c in calc.curl(F, q)])
    b = calc.surface_cross_integral(F, q)
    return _vector_relative(a - b, float(np.max(np.abs(F))), a, b)


def calculus_checks(N, rng, trials=10):
    q = build_lgl(N)
    n = q.n
    checks = [_check("sbp", N, sbp_defect(q))]
    checks.append(_check("quadrature_exact", N,
                         max(monomial_defect(q, k) for k in range(2 * N))))

    worst = dict.fromkeys(("dxgl", "dgl", "greens_first", "greens_second",
                           "gradient_integral", "curl_integral"), 0.0)
    for _ in range(trials):
        F = rng.standard_normal((3, n, n, n))
        V = rng.standard_normal((n, n, n))
        Phi = rng.standard_normal((n, n, n))
        g1, g2 = calc.greens_defects(Phi, V, q)
        for key, val in (("dxgl", calc.dxgl_defect(F, V, q)), ("dgl", calc.dgl_defect(F, q)),
                         ("greens_first", g1), ("greens_second", g2),
                         ("gradient_integral", gradient_integral_defect(V, q)),
                         ("curl_integral", curl_integral_defect(F, q))):
            worst[key] = max(worst[key], val)
    checks += [_check(k, N, v) for k, v in worst.items()]

    xi, eta, _ = calc.tensor_grid(q)
    low = calc.aliasing_defect(xi, eta, q) if N >= 2 else calc.aliasing_defect(xi, np.ones_like(xi), q)
    checks.append(_check("product_rule_low_degree", N, low, 1e-13))
    checks.append(_check("aliasing_witness", N, calc.aliasing_defect(xi**N, xi**N, q), 1e-6, "min"))
    return checks


def metric_checks(N, metric_mode="curl", warp=0.05, counts=(2, 2, 2)):
    mesh = build_box_mesh(counts=counts, warp=warp, N=N, metric_mode=metric_mode)
    return [
        _check(f"metric_identity_{metric_mode}", N, metric_identity_defect(mesh.geometry, mesh.q)),
        _check("mesh_conformity", N, conformity_defect(mesh)),
        _check("positive_jacobian", N, -float(np.min(mesh.geometry.J)), 0.0),
    ]


def run_suite(degrees=range(1, 9), seed=0, metric_mode="curl", trials=10):
    rng = np.random.default_rng(seed)
    checks = []
    for N in degrees:
        checks += calculus_checks(N, rng, trials)
        checks += metric_checks(N, metric_mode)
    return checks


def report(checks, degrees, seed, metric_mode):
    return {
        "degrees": list(degrees),
        "seed": seed,
        "metric": metric_mode,
        "passed": all(c.passed for c in checks),
        "n_checks": len(checks),
        "n_failed": sum(not c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
    }

"""Element mappings, metric terms and conforming box meshes.

Spatial vector data carry the Cartesian component last: nodal coordinates are
``X[i, j, k, :]``, covariant and contravariant vectors ``a[d, i, j, k, :]`` with
``d`` the reference direction.  Mesh-level arrays add a leading element axis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import calculus as calc
from .errors import NonPositiveJacobian
from .quadrature import build_lgl

METRIC_MODES = ("curl", "cross")


def covariant_vectors(X, q):
    """``a_d = dX/dxi^d`` at the nodes, shape ``(3, n, n, n, 3)``."""
    return np.stack([calc.partial(X, q, d) for d in range(3)])


def contravariant_cross(a):
    """``Ja^i = a_j x a_k`` for cyclic ``(i, j, k)``."""
    return np.stack([np.cross(a[(i + 1) % 3], a[(i + 2) % 3]) for i in range(3)])


def contravariant_curl(X, q):
    """Curl-form contravariant vectors whose discrete divergence vanishes.

    ``(Ja^i)_n = -[curl_xi(X_l grad_xi X_m)]_i`` with ``(n, m, l)`` cyclic, the
    products formed pointwise at the nodes before differentiation.
    """
    Ja = np.empty((3,) + X.shape)
    for n in range(3):
        m, l = (n + 1) % 3, (n + 2) % 3
        V = X[..., l] * calc.gradient(X[..., m], q)
        Ja[..., n] = -calc.curl(V, q)
    return Ja


def jacobian(a, element=0):
    J = np.einsum("...m,...m->...", a[0], np.cross(a[1], a[2]))
    bad = np.argwhere(J <= 0.0)
    if len(bad):
        node = tuple(int(v) for v in bad[0])
        raise NonPositiveJacobian(element, node, float(J[node]))
    return J


def metric_divergence(Ja, q):
    """``sum_i d(Ja^i_n)/dxi^i`` for each Cartesian component ``n``."""
    return np.stack([calc.divergence(Ja[..., n], q) for n in range(3)], axis=-1)


@dataclass(frozen=True, eq=False)
class ElementGeometry:
    """Metric data of one element (or, in a mesh, of all elements stacked)."""

    x: np.ndarray
    a_cov: np.ndarray
    Ja: np.ndarray
    J: np.ndarray
    face_normal: np.ndarray
    face_scale: np.ndarray
    metric_mode: str

    def element(self, r):
        return ElementGeometry(self.x[r], self.a_cov[r], self.Ja[r], self.J[r],
                               self.face_normal[r], self.face_scale[r], self.metric_mode)


def face_geometry(Ja):
    """Outward physical unit normals and area scale factors on the six faces.

    On face ``xi^d = +-1`` the contravariant normal is ``+-Ja^d``; its length is
    the ratio of physical to reference area.  Returns ``(normal, scale)`` with
    shapes ``(6, n, n, 3)`` and ``(6, n, n)``.
    """
    normals, scales = [], []
    for d in range(3):
        for s in (0, 1):
            nvec = calc.FACE_SIGNS[2 * d + s] * calc.face_trace(Ja[d], d, s)
            mag = np.linalg.norm(nvec, axis=-1)
            normals.append(nvec / mag[..., None])
            scales.append(mag)
    return np.stack(normals), np.stack(scales)


def build_geometry(X, q, metric_mode="curl", element=0):
    if metric_mode not in METRIC_MODES:
        raise ValueError(f"unknown metric mode {metric_mode!r}")
    a = covariant_vectors(X, q)
    J = jacobian(a, element)
    Ja = contravariant_curl(X, q) if metric_mode == "curl" else contravariant_cross(a)
    normal, scale = face_geometry(Ja)
    return ElementGeometry(X, a, Ja, J, normal, scale, metric_mode)


def metric_identity_defect(geom, q):
    """Max-norm of the discrete metric identity, relative to ``max |Ja|``."""
    div = metric_divergence(geom.Ja, q) if geom.Ja.ndim == 5 else np.stack(
        [metric_divergence(Ja, q) for Ja in geom.Ja])
    return float(np.max(np.abs(div)) / np.max(np.abs(geom.Ja)))


def surface_weights(geom, q):
    """Physical area element at each face node: ``|Ja^d| w_j w_k``."""
    return geom.face_scale * calc.face_weights(q)


def closure_defect(geom, q):
    """``|closed-surface integral of n dS|`` for a single element."""
    return float(np.linalg.norm(np.einsum("fij,fijm->m", surface_weights(geom, q), geom.face_normal)))


# ----------------------------------------------------------------------------
# box meshes

def warp_displacement(x, lo, length, alpha):
    """Fixed smooth warp used for curved-element meshes."""
    xh = (x - lo) / length
    s = np.sin(np.pi * xh)
    disp = np.stack([s[..., 1] * s[..., 2], s[..., 2] * s[..., 0], s[..., 0] * s[..., 1]], axis=-1)
    return alpha * length * disp


@dataclass(frozen=True, eq=False)
class Mesh:
    """Structured conforming hexahedral mesh of a box.

    ``interior[d]`` holds ``(owner, neighbor)`` element index arrays for faces
    normal to reference direction ``d``: the owner's ``xi^d = +1`` face meets
    the neighbor's ``xi^d = -1`` face node-for-node.  ``boundary[f]`` lists the
    elements whose local face ``f`` lies on the domain boundary; all such faces
    carry the ``"characteristic"`` tag.
    """

    q: object
    counts: tuple
    lo: np.ndarray
    hi: np.ndarray
    warp: float
    geometry: ElementGeometry
    interior: tuple
    boundary: tuple
    h_min: float
    boundary_tag: str = "characteristic"
    corners: np.ndarray = field(default=None, repr=False)

    @property
    def n_elements(self):
        return int(np.prod(self.counts))

    @property
    def degree(self):
        return self.q.degree

    def element_index(self, i1, i2, i3):
        n1, n2, _ = self.counts
        return i1 + n1 * (i2 + n2 * i3)


def element_map(lo_e, hi_e, domain_lo, domain_hi, alpha):
    """Analytic map of one box element composed with the global warp."""
    L = domain_hi - domain_lo

    def X(xi, eta, zeta):
        ref = np.stack([xi, eta, zeta], axis=-1)
        x = lo_e + 0.5 * (ref + 1.0) * (hi_e - lo_e)
        if alpha:
            x = x + warp_displacement(x, domain_lo, L, alpha)
        return x

    return X


def build_box_mesh(lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0), counts=(1, 1, 1), warp=0.0, N=4,
                   metric_mode="curl"):
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    counts = tuple(int(c) for c in counts)
    if any(c < 1 for c in counts):
        raise ValueError("element counts must be >= 1")
    if np.any(hi <= lo):
        raise ValueError("box extents must satisfy lo < hi")
    q = build_lgl(N)
    h = (hi - lo) / np.array(counts)
    xi, eta, zeta = calc.tensor_grid(q)

    geoms = []
    corners = []
    for i3 in range(counts[2]):
        for i2 in range(counts[1]):
            for i1 in range(counts[0]):
                e = len(geoms)
                lo_e = lo + h * np.array([i1, i2, i3])
                X = element_map(lo_e, lo_e + h, lo, hi, warp)(xi, eta, zeta)
                geoms.append(build_geometry(X, q, metric_mode, element=e))
                corners.append((lo_e, lo_e + h))

    def stack(name):
        return np.stack([getattr(g, name) for g in geoms])

    geometry = ElementGeometry(stack("x"), stack("a_cov"), stack("Ja"), stack("J"),
                               stack("face_normal"), stack("face_scale"), metric_mode)

    n1, n2, n3 = counts
    idx = np.arange(n1 * n2 * n3).reshape(n3, n2, n1)
    interior, boundary = [], [None] * 6
    # idx axes are (i3, i2, i1); direction d corresponds to idx axis 2 - d
    for d in range(3):
        ax = 2 - d
        owner = np.take(idx, np.arange(counts[d] - 1), axis=ax).ravel()
        neighbor = np.take(idx, np.arange(1, counts[d]), axis=ax).ravel()
        interior.append((owner, neighbor))
        boundary[2 * d] = np.take(idx, 0, axis=ax).ravel()
        boundary[2 * d + 1] = np.take(idx, counts[d] - 1, axis=ax).ravel()

    return Mesh(q, counts, lo, hi, float(warp), geometry, tuple(interior), tuple(boundary),
                float(np.min(h)), corners=np.array(corners))


def conformity_defect(mesh):
    """Max physical distance between paired nodes on interior faces."""
    worst = 0.0
    x = mesh.geometry.x
    for d, (own, nbr) in enumerate(mesh.interior):
        if len(own) == 0:
            continue
        xl = calc.face_trace(x[own], d + 1, 1)
        xr = calc.face_trace(x[nbr], d + 1, 0)
        worst = max(worst, float(np.max(np.abs(xl - xr))))
    return worst


def mesh_summary(mesh):
    return {
        "elements": mesh.n_elements,
        "N": mesh.degree,
        "counts": list(mesh.counts),
        "warp": mesh.warp,
        "metric_mode": mesh.geometry.metric_mode,
        "min_J": float(np.min(mesh.geometry.J)),
        "metric_defect": metric_identity_defect(mesh.geometry, mesh.q),
    }


def write_mesh_summary(mesh, path):
    with open(path, "w") as fh:
        json.dump(mesh_summary(mesh), fh, indent=2, sort_keys=True)

"""The extrinsic picture: negatively curved 3-metrics as spacelike hypersurfaces of R^{3,1}.

Signature is (+,+,+,-) and the unit normal nu is timelike, <nu, nu> = -1.
With the Gauss formula D_X Y = nabla_X Y + A(X, Y) nu, differentiating
<e_j, nu> = 0 forces d_k nu = +W^m_k e_m, where W = g^-1 A is the Weingarten
map.  The second fundamental form is fixed with positive principal curvatures.
"""

import math
from dataclasses import dataclass

import numpy as np

from .curvature import adjugate_cross, curvature_pack
from .errors import NonPositiveEin, NonSymmetricA
from .grid import dumps
from .tensors import inv3, minkowski_dot
from .third_order import codazzi_scale, third_order

ETA = np.diag([1.0, 1.0, 1.0, -1.0])


def _require_spd(pack):
    if not np.all(pack.ein_spd):
        raise NonPositiveEin("Einstein tensor is not positive definite at some node")


def weingarten_from_intrinsic(pack):
    """(W, A, Kgauss) with W = sqrt(detE) opEin^-1, A = g W = Ob and Kgauss = det W = sqrt(detE)."""
    _require_spd(pack)
    A = pack.Ob
    W = np.einsum("...ik,...kj->...ij", pack.ginv, A)
    return W, A, np.sqrt(pack.detE)


def principal_curvatures(W, g):
    """Eigenvalues of the g-self-adjoint map W, ascending."""
    from .tensors import sqrtm_spd
    root, iroot = sqrtm_spd(g)
    s = np.einsum("...ia,...ab,...bj->...ij", root, W, iroot)
    return np.linalg.eigvalsh(0.5 * (s + np.swapaxes(s, -1, -2)))


def gauss_model(A, W):
    """Riem[i, j, k, l] of Rm(X, Y) Z = A(X, Z) W(Y) - A(Y, Z) W(X)."""
    return np.einsum("...ik,...lj->...ijkl", A, W) - np.einsum("...jk,...li->...ijkl", A, W)


def gauss_residual(pack, A, relative=True):
    """Max-norm residuals (full, contracted, scalar) of the Gauss equations for a candidate A."""
    A = np.asarray(A, dtype=float)
    if not np.allclose(A, np.swapaxes(A, -1, -2), rtol=0.0, atol=1e-12):
        raise NonSymmetricA("second fundamental form must be symmetric")
    W = np.einsum("...ik,...kj->...ij", pack.ginv, A)
    H = np.trace(W, axis1=-2, axis2=-1)
    full = np.max(np.abs(pack.Riem - gauss_model(A, W)))
    W2 = W @ W
    ric_model = np.einsum("...ik,...kj->...ij", pack.g, W2 - H[..., None, None] * W)
    contracted = np.max(np.abs(pack.Ric - ric_model))
    a2 = np.einsum("...ij,...ji->...", W, W)
    scalar = np.max(np.abs(pack.Sc - (a2 - H * H)))
    if relative:
        full /= max(float(np.max(np.abs(pack.Riem))), 1e-300)
        contracted /= max(float(np.max(np.abs(pack.Ric))), 1e-300)
        scalar /= max(float(np.max(np.abs(pack.Sc))), 1e-300)
    return float(full), float(contracted), float(scalar)


def gauss_cross_residual(pack):
    """max |2 Kgauss A - 2 adj Ein| relative to |adj Ein|; an algebraic identity on SPD packs."""
    W, A, K = weingarten_from_intrinsic(pack)
    lhs = 2.0 * K[..., None, None] * A
    rhs = 2.0 * adjugate_cross(pack.g, pack.Ein)
    return float(np.max(np.abs(lhs - rhs)) / max(float(np.max(np.abs(rhs))), 1e-300))


# -- frame integration -------------------------------------------------------------

@dataclass
class EmbeddingState:
    F: np.ndarray          # (..., 4) positions
    frame: np.ndarray      # (..., 3, 4) e_1, e_2, e_3
    nu: np.ndarray         # (..., 4)
    gRecovered: np.ndarray
    metricResidual: float
    pathResidual: float
    normalResidual: float
    path_order: tuple

    def residuals(self):
        return {"metricResidual": self.metricResidual, "pathResidual": self.pathResidual,
                "normalResidual": self.normalResidual}

    def to_json(self):
        order = lambda a, k: np.asarray(a).transpose((2, 1, 0) + tuple(range(3, 3 + k))).reshape(-1).tolist()
        return dumps({"F": order(self.F, 1), "frame": order(self.frame, 2), "nu": order(self.nu, 1),
                      "residuals": self.residuals()})


def _generators(pack, W, A):
    """C[..., k, j, m]: d_k X_j = sum_m C_kjm X_m for X = (e_1, e_2, e_3, nu)."""
    shape = pack.g.shape[:-2]
    C = np.zeros(shape + (3, 4, 4))
    C[..., :, :3, :3] = np.einsum("...mkj->...kjm", pack.Gamma)
    C[..., :, :3, 3] = A
    C[..., :, 3, :3] = np.swapaxes(W, -1, -2)   # C[k, 3, m] = W^m_k
    return C


def _midpoint(f, i, step, axis):
    """Cubic Lagrange value of f halfway between slice i and i + step along ``axis``."""
    n = f.shape[axis]
    lo = min(i, i + step)
    base = min(max(lo - 1, 0), n - 4)
    idx = [base + q for q in range(4)]
    x = lo + 0.5 - base
    out = 0.0
    for a, ia in enumerate(idx):
        w = 1.0
        for b in range(4):
            if b != a:
                w *= (x - b) / (a - b)
        out = out + w * np.take(f, ia, axis=axis)
    return out


def _sweep(F, X, C, axis, start, h):
    """Transport (F, X) along ``axis`` from slice ``start`` to both ends with RK4."""
    n = F.shape[axis]
    Ck = np.take(C, axis, axis=3)    # node-first field of 4x4 generators for this axis
    take = lambda a, i: np.take(a, i, axis=axis)

    def put(a, i, v):
        sl = [slice(None)] * a.ndim
        sl[axis] = i
        a[tuple(sl)] = v

    for step in (1, -1):
        ds = step * h
        i = start
        while 0 <= i + step < n:
            x0, f0 = take(X, i), take(F, i)
            c0, c1, cm = take(Ck, i), take(Ck, i + step), _midpoint(Ck, i, step, axis)
            k1 = c0 @ x0
            x2 = x0 + 0.5 * ds * k1
            k2 = cm @ x2
            x3 = x0 + 0.5 * ds * k2
            k3 = cm @ x3
            x4 = x0 + ds * k3
            k4 = c1 @ x4
            put(X, i + step, x0 + (ds / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
            put(F, i + step, f0 + (ds / 6.0) * (x0[..., axis, :] + 2 * x2[..., axis, :]
                                                + 2 * x3[..., axis, :] + x4[..., axis, :]))
            i += step
    return F, X


def _integrate(g, C, h, base, order):
    shape = g.shape[:-2]
    F = np.full(shape + (4,), np.nan)
    X = np.full(shape + (4, 4), np.nan)
    L = np.linalg.cholesky(g[base])
    x0 = np.zeros((4, 4))
    x0[:3, :3] = L
    x0[3, 3] = 1.0
    F[base] = 0.0
    X[base] = x0
    for axis in order:
        F, X = _sweep(F, X, C, axis, base[axis], h[axis])
    return F, X


def integrate_embedding(grid, pack=None, A=None, path_order=(0, 1, 2), stencil_order=2):
    """Integrate the Gauss-Weingarten system from the central node along coordinate lines.

    ``A`` defaults to Ob.  pathResidual compares against the reversed axis order.
    """
    if pack is None:
        pack = curvature_pack(grid, stencil_order)
    _require_spd(pack)
    if A is None:
        A = pack.Ob
    A = np.asarray(A, dtype=float)
    if not np.allclose(A, np.swapaxes(A, -1, -2), rtol=0.0, atol=1e-12):
        raise NonSymmetricA("second fundamental form must be symmetric")
    path_order = tuple(int(a) for a in path_order)
    if sorted(path_order) != [0, 1, 2]:
        raise ValueError(f"path order must be a permutation of the axes, got {path_order!r}")
    W = np.einsum("...ik,...kj->...ij", pack.ginv, A)
    C = _generators(pack, W, A)
    base = tuple(n // 2 for n in grid.dims)
    h = tuple(grid.spacing)
    F, X = _integrate(pack.g, C, h, base, path_order)
    F2, _ = _integrate(pack.g, C, h, base, path_order[::-1])
    frame, nu = X[..., :3, :], X[..., 3, :]
    g_rec = np.einsum("...ia,ab,...jb->...ij", frame, ETA, frame)
    normal = max(float(np.max(np.abs(minkowski_dot(nu, nu) + 1.0))),
                 float(np.max(np.abs(np.einsum("...ia,ab,...b->...i", frame, ETA, nu)))))
    return EmbeddingState(F=F, frame=frame, nu=nu, gRecovered=g_rec,
                          metricResidual=float(np.max(np.abs(g_rec - pack.g))),
                          pathResidual=float(np.max(np.abs(F - F2))),
                          normalResidual=normal, path_order=path_order)


def fit_quadric(F):
    """Least-squares center c and level of <F - c, F - c> over a point cloud (Minkowski form)."""
    P = np.reshape(F, (-1, 4))
    q = minkowski_dot(P, P)
    # q(F) = 2 <F, c> + beta  <=>  <F - c, F - c> = beta + q(c)
    M = np.hstack([2.0 * P * np.array([1.0, 1.0, 1.0, -1.0]), np.ones((len(P), 1))])
    sol, *_ = np.linalg.lstsq(M, q, rcond=None)
    c = sol[:4]
    level = minkowski_dot(P - c, P - c)
    return c, level


def hyperboloid_deviation(F, radius2=1.0):
    """max |<F - c, F - c> + radius2| for the fitted center c."""
    c, level = fit_quadric(F)
    return float(np.max(np.abs(level + radius2))), c


# -- hyperboloid family and the Gauss curvature flow ---------------------------------

@dataclass(frozen=True)
class HyperboloidFamily:
    """Hyperboloids of radius r(t) = (4t + r0^4)^(1/4) moving by Gauss curvature."""

    r0: float

    def radius(self, t):
        return (4.0 * t + self.r0 ** 4) ** 0.25

    def metric_scale(self, t):
        """Induced metric = metric_scale * g_H."""
        return self.radius(t) ** 2

    def gauss_curvature(self, t):
        return self.radius(t) ** -3

    def principal_curvatures(self, t):
        return (1.0 / self.radius(t),) * 3

    def sectional(self, t):
        return -self.radius(t) ** -2


def gcf_xcf_correspondence(r0, t):
    """Both routes to d/dt of the induced metric, as multiples of g_H, plus the scale checks."""
    from .frame import FrameMetric, frame_curvature

    fam = HyperboloidFamily(float(r0))
    r = fam.radius(t)
    # extrinsic: 2 K A with K = r^-3 and A = r g_H
    extrinsic = 2.0 * fam.gauss_curvature(t) * r
    # intrinsic: 2 adj Ein of r^2 g_H, with g_H the unit hyperbolic metric of the solvable group
    pack = frame_curvature(FrameMetric.solvable(r * r * np.eye(3)))
    intrinsic_m = 2.0 * adjugate_cross(pack.g, pack.Ein)
    intrinsic = float(intrinsic_m[0, 0])
    offdiag = float(np.max(np.abs(intrinsic_m - intrinsic * np.eye(3))))
    k0 = -1.0 / fam.r0 ** 2
    xcf_scale = math.sqrt(4.0 * k0 * k0 * t + 1.0) * fam.r0 ** 2
    return {
        "r0": float(r0), "t": float(t), "radius": r,
        "extrinsic": extrinsic, "intrinsic": intrinsic,
        "routes_diff": abs(extrinsic - intrinsic) + offdiag,
        "induced_scale": fam.metric_scale(t), "xcf_scale": xcf_scale,
        "scale_diff": abs(fam.metric_scale(t) - xcf_scale),
        # d/dt r^2 = 2 r r' with r' = r^-3
        "radius_ode_diff": abs(2.0 * r * r ** -3 - extrinsic),
    }


# -- integrability -------------------------------------------------------------------

def codazzi_defect_norm(field, pack):
    """Pointwise E-norm of the Codazzi defect."""
    return np.sqrt(np.maximum(field.defect_norm2, 0.0))


def is_integrable(grid, tol=1e-6, stencil_order=2, derivatives="stencil"):
    """Classify Ob as Codazzi (embeddable) or not; the defect is compared with tol * scale of nabla Ob."""
    pack = curvature_pack(grid, stencil_order, derivatives=derivatives)
    mask = grid.interior_mask()
    inner = pack.point(mask)
    if not np.all(inner.ein_spd):
        raise NonPositiveEin("Einstein tensor is not positive definite on the interior")
    field = third_order(grid, pack, stencil_order, derivatives)
    defect = float(np.max(codazzi_defect_norm(field, pack)[mask]))
    scale = codazzi_scale(pack.point(mask), _restrict(field, mask))
    return {"integrable": bool(defect <= tol * scale), "defect": defect, "scale": scale}


def _restrict(field, mask):
    from dataclasses import fields, replace
    return replace(field, **{f.name: getattr(field, f.name)[mask] for f in fields(field)})

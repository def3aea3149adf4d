"""Third-order curvature quantities: T, the Devil tensor, the Codazzi defect of Ob.

All of them are pointwise functions of (g, Ein, nabla Ein).  The covariant
derivative of Ein can come from three sources:

* ``stencil``: central differences of the Ein field plus Christoffel terms;
* ``analytic``: a complex-step derivative through the family's exact jet;
* a homogeneous frame, where components are constant and only connection
  terms survive (see :mod:`xcflab.frame`).

nabla Ob is obtained from nabla Ein by the chain rule, never by differencing
Ob itself, so the Devil/Codazzi identity is checked on one consistent jet.
"""

from dataclasses import dataclass

import numpy as np

from . import stencil
from .curvature import adjugate_cross, curvature_pack, einstein_from_jet
from .errors import NonPositiveEin
from .tensors import norm3, transform_last2

CSTEP = 1e-30


def covariant_2form(dB, B, gamma):
    """nabla_l B_ab = d_l B_ab - Gamma^m_la B_mb - Gamma^m_lb B_am."""
    return (dB - np.einsum("...mla,...mb->...lab", gamma, B)
            - np.einsum("...mlb,...am->...lab", gamma, B))


def complex_step_gradient(fn, x):
    """d_l fn(x) for an analytic fn, stacked after the node axes."""
    parts = []
    for l in range(3):
        xc = x.astype(complex)
        xc[..., l] += 1j * CSTEP
        parts.append(fn(xc).imag / CSTEP)
    return np.stack(parts, axis=x.ndim - 1)


def partial_field(grid, fn, stencil_order=2, derivatives="stencil"):
    """Partial derivatives d_l of a curvature-derived field on the grid nodes.

    ``fn`` maps a metric 2-jet (g, dg, ddg) to the field.
    """
    if derivatives == "analytic":
        fam = grid.family
        x = grid.coordinates()
        return complex_step_gradient(lambda xc: fn(*fam.jet(xc, grid.t, grid.variant, grid.K)), x)
    from .curvature import fd_jet
    s = stencil.half_width(stencil_order)
    f = fn(*fd_jet(grid, stencil_order, pad=s))
    return stencil.crop(stencil.gradient(f, grid.h, stencil_order), s)


def nabla_ein(grid, pack, stencil_order=2, derivatives="stencil"):
    d_ein = partial_field(grid, einstein_from_jet, stencil_order, derivatives)
    return covariant_2form(d_ein, pack.Ein, pack.Gamma)


def _adj_from_jet(g, dg, ddg):
    return adjugate_cross(g, einstein_from_jet(g, dg, ddg))


def nabla_adj(grid, pack, stencil_order=2, derivatives="stencil"):
    d_adj = partial_field(grid, _adj_from_jet, stencil_order, derivatives)
    return covariant_2form(d_adj, pack.adjEin, pack.Gamma)


@dataclass
class ThirdOrderField:
    nablaEin: np.ndarray      # nabla_l Ein_ab
    nablaEup: np.ndarray      # nabla_l E^ab
    T: np.ndarray             # T^kij = E^kl nabla_l E^ij
    Ti: np.ndarray            # T^i = V_jk T^ijk
    D: np.ndarray             # Devil tensor D^ijk
    nablaOb: np.ndarray       # nabla_l Ob_ab
    codazziDefect: np.ndarray  # nabla_i Ob_jk - nabla_j Ob_ik
    devil_norm2: np.ndarray   # |D|^2_V
    defect_norm2: np.ndarray  # |defect|^2_E
    detE: np.ndarray

    def identity_residuals(self, V, mask=None):
        """Max-norm residuals of the Devil tensor identities and of the Devil/Codazzi identity.

        Identity residuals are relative to the largest T entry (floor 1); the
        Devil/Codazzi one is relative node-wise to the larger side.
        """
        sel = (lambda a: a) if mask is None else (lambda a: a[mask])
        D = self.D
        scale = max(1.0, float(np.max(np.abs(sel(self.T)))))
        anti = np.abs(D + np.swapaxes(D, -3, -2))
        cyc = np.abs(D + np.einsum("...kij->...ijk", D) + np.einsum("...jki->...ijk", D))
        tr_ij = np.abs(np.einsum("...ij,...ijk->...k", V, D))
        tr_ik = np.abs(np.einsum("...ik,...ijk->...j", V, D))
        tr_jk = np.abs(np.einsum("...jk,...ijk->...i", V, D))
        lhs = self.devil_norm2 * self.detE
        rhs = self.defect_norm2
        denom = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
        rel = np.where(np.maximum(np.abs(lhs), np.abs(rhs)) > 1e-24, np.abs(lhs - rhs) / denom, 0.0)
        return {
            "antisymmetry": float(np.max(sel(anti))) / scale,
            "cyclic": float(np.max(sel(cyc))) / scale,
            "trace_ij": float(np.max(sel(tr_ij))) / scale,
            "trace_ik": float(np.max(sel(tr_ik))) / scale,
            "trace_jk": float(np.max(sel(tr_jk))) / scale,
            "devil_codazzi": float(np.max(sel(rel))),
        }


def third_order_pointwise(pack, nabla_ein_cov):
    """Assemble every third-order quantity from pack data and nabla Ein."""
    if not np.all(pack.ein_spd):
        raise NonPositiveEin("Einstein tensor is not positive definite at some node")
    ginv, Eup, V, detE = pack.ginv, pack.Eup, pack.V, pack.detE
    nEup = transform_last2(ginv, nabla_ein_cov)
    T = np.einsum("...kl,...lij->...kij", Eup, nEup)
    Ti = np.einsum("...jk,...ijk->...i", V, T)
    D = (T - np.swapaxes(T, -3, -2)
         - 0.5 * (np.einsum("...i,...jk->...ijk", Ti, Eup) - np.einsum("...j,...ik->...ijk", Ti, Eup)))
    nV = -transform_last2(V, nEup)
    dlogdet = np.einsum("...ij,...lij->...l", V, nEup)
    sq = np.sqrt(detE)
    nOb = sq[..., None, None, None] * (0.5 * dlogdet[..., :, None, None] * V[..., None, :, :] + nV)
    defect = nOb - np.swapaxes(nOb, -3, -2)
    dn2 = norm3(V, D)
    xn2 = norm3(Eup, defect)
    return ThirdOrderField(nablaEin=nabla_ein_cov, nablaEup=nEup, T=T, Ti=Ti, D=D, nablaOb=nOb,
                           codazziDefect=defect, devil_norm2=dn2, defect_norm2=xn2, detE=detE)


def third_order(grid, pack=None, stencil_order=2, derivatives="stencil"):
    """Third-order field on every node of ``grid``."""
    if pack is None:
        pack = curvature_pack(grid, stencil_order, derivatives=derivatives)
    if not np.all(pack.ein_spd):
        raise NonPositiveEin("Einstein tensor is not positive definite at some node")
    return third_order_pointwise(pack, nabla_ein(grid, pack, stencil_order, derivatives))


def bianchi_cross_field(pack, nabla_adj_cov):
    """E^ij nabla_i adjE_jk - 1/2 E^ij nabla_k adjE_ij."""
    E = pack.Eup
    return (np.einsum("...ij,...ijk->...k", E, nabla_adj_cov)
            - 0.5 * np.einsum("...ij,...kij->...k", E, nabla_adj_cov))


def bianchi_cross_residual(grid, pack=None, stencil_order=2, derivatives="stencil", interior=True):
    """Max-norm of the Bianchi-type identity residual for adj Ein."""
    if pack is None:
        pack = curvature_pack(grid, stencil_order, derivatives=derivatives)
    if not np.all(pack.ein_spd):
        raise NonPositiveEin("Einstein tensor is not positive definite at some node")
    res = bianchi_cross_field(pack, nabla_adj(grid, pack, stencil_order, derivatives))
    norm = np.sqrt(np.sum(res * res, axis=-1))
    if interior:
        norm = norm[grid.interior_mask()]
    return float(np.max(norm))


def codazzi_scale(pack, field):
    """Size of the pieces that cancel inside nabla Ob (partials and connection terms), E-norm, max over nodes."""
    Ob = pack.Ob
    conn = np.abs(np.einsum("...mla,...mb->...lab", pack.Gamma, Ob)) \
        + np.abs(np.einsum("...mlb,...am->...lab", pack.Gamma, Ob))
    partial = np.abs(field.nablaOb) + conn
    E = pack.Eup
    n2 = norm3(np.abs(E), partial)
    return float(np.sqrt(np.max(n2)))

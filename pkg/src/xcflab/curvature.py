"""Pointwise curvature calculus: from a metric 2-jet to every curvature tensor.

Array index conventions (leading node axes omitted)::

    g[i, j]            metric
    dg[a, i, j]        d_a g_ij
    ddg[a, b, i, j]    d_a d_b g_ij
    Gamma[k, i, j]     Gamma^k_ij, nabla_{d_i} d_j = Gamma^k_ij d_k
    Riem[i, j, k, l]   R_ijk^l, Rm(d_i, d_j) d_k = R_ijk^l d_l
    Rm[i, j, k, l]     g(Rm(d_i, d_j) d_k, d_l)

with Rm(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z, so the
round sphere has Rm(X,Y,Y,X) > 0.
"""

from dataclasses import dataclass

import numpy as np

from . import stencil
from .errors import DegeneratePlane, NonPositiveMetric
from .grid import PERIODIC
from .tensors import adj3, det3, inv3, is_spd, kulkarni_nomizu, raise_both, sqrtm_spd


def christoffel_lowered(dg):
    """Gamma_lij = 1/2 (d_i g_lj + d_j g_li - d_l g_ij)."""
    return 0.5 * (np.einsum("...ilj->...lij", dg) + np.einsum("...jli->...lij", dg) - dg)


# The jet kernels below run with the node axes flattened and moved last:
# einsum then loops over long contiguous node runs instead of 3-element axes.

def _to_last(a, nt):
    lead = a.shape[:a.ndim - nt]
    flat = a.reshape((-1,) + a.shape[a.ndim - nt:])
    return np.ascontiguousarray(np.moveaxis(flat, 0, -1)), lead


def _to_first(a, lead):
    return np.moveaxis(a, -1, 0).reshape(lead + a.shape[:-1])


def _jet_last(g, dg, ddg):
    G, lead = _to_last(np.asarray(g), 2)
    dG, _ = _to_last(np.asarray(dg), 3)
    ddG, _ = _to_last(np.asarray(ddg), 4)
    gi, _ = _to_last(inv3(np.asarray(g)), 2)
    glow = 0.5 * (np.einsum("ilj...->lij...", dG) + np.einsum("jli...->lij...", dG) - dG)
    gamma = np.einsum("kl...,lij...->kij...", gi, glow)
    return G, dG, ddG, gi, glow, gamma, lead


def riemann_from_jet(g, dg, ddg):
    """Return (ginv, Gamma, Riem) from the metric 2-jet; complex input is allowed."""
    G, dG, ddG, gi, glow, gamma, lead = _jet_last(g, dg, ddg)
    # d_a g^kl = -g^km d_a g_mn g^nl
    dginv = -np.einsum("km...,amn...,nl...->akl...", gi, dG, gi)
    dglow = 0.5 * (np.einsum("ailj...->alij...", ddG) + np.einsum("ajli...->alij...", ddG) - ddG)
    dgamma = np.einsum("akl...,lij...->akij...", dginv, glow) + np.einsum("kl...,alij...->akij...", gi, dglow)
    riem = (np.einsum("iljk...->ijkl...", dgamma) - np.einsum("jlik...->ijkl...", dgamma)
            + np.einsum("mjk...,lim...->ijkl...", gamma, gamma)
            - np.einsum("mik...,ljm...->ijkl...", gamma, gamma))
    return _to_first(gi, lead), _to_first(gamma, lead), _to_first(riem, lead)


def einstein_from_riemann(g, ginv, riem):
    ric = np.einsum("...ijki->...jk", riem)
    ric = 0.5 * (ric + np.swapaxes(ric, -1, -2))
    sc = np.einsum("...ij,...ij->...", ginv, ric)
    ein = ric - 0.5 * sc[..., None, None] * g
    return ric, sc, ein


def einstein_from_jet(g, dg, ddg):
    """Ein straight from the 2-jet through a Ricci-only contraction path (no full Riemann)."""
    G, dG, ddG, gi, glow, gamma, lead = _jet_last(g, dg, ddg)
    # d_i Gamma^i_jk
    u = -np.einsum("ia...,iab...,bl...->l...", gi, dG, gi)
    div = np.einsum("l...,ljk...->jk...", u, glow) + 0.5 * (
        np.einsum("il...,ijlk...->jk...", gi, ddG) + np.einsum("il...,iklj...->jk...", gi, ddG)
        - np.einsum("il...,iljk...->jk...", gi, ddG))
    # d_j Gamma^i_ik = d_j d_k log sqrt(det g)
    dgi = -np.einsum("am...,jmn...,nb...->jab...", gi, dG, gi)
    hlog = 0.5 * (np.einsum("jab...,kab...->jk...", dgi, dG) + np.einsum("ab...,jkab...->jk...", gi, ddG))
    ric = (div - hlog + np.einsum("iim...,mjk...->jk...", gamma, gamma)
           - np.einsum("ijm...,mik...->jk...", gamma, gamma))
    ric = 0.5 * (ric + np.swapaxes(ric, 0, 1))
    sc = np.einsum("ij...,ij...->...", gi, ric)
    return _to_first(ric - 0.5 * sc * G, lead)


def adjugate_cross(g, ein):
    """adj Ein as a bilinear form through the cofactor route: g adj(Ein) g / det g."""
    return (g @ adj3(ein) @ g) / det3(g)[..., None, None]


@dataclass
class CurvaturePack:
    """Pointwise curvature data on a block of nodes (or a single point)."""

    g: np.ndarray
    ginv: np.ndarray
    Gamma: np.ndarray
    Riem: np.ndarray
    Rm: np.ndarray
    Ric: np.ndarray
    Sc: np.ndarray
    Ein: np.ndarray
    lam: np.ndarray        # eigenvalues of opEin = g^-1 Ein, ascending
    evecs: np.ndarray      # g-orthonormal eigenvectors, column i belongs to lam[i]
    adjEin: np.ndarray
    V: np.ndarray          # Ein^-1 as a bilinear form, NaN where Ein is not SPD
    detE: np.ndarray
    Ob: np.ndarray         # sqrt(detE) V
    traceCross: np.ndarray
    Eup: np.ndarray        # E^ij = g^ia g^jb Ein_ab

    @property
    def ein_spd(self):
        return self.lam[..., 0] > 0

    @property
    def sqrt_detg(self):
        return np.sqrt(det3(self.g))

    @property
    def opEin(self):
        return np.einsum("...ik,...kj->...ij", self.ginv, self.Ein)

    def point(self, idx):
        """Restrict every field to one node (or any numpy index)."""
        return CurvaturePack(**{k: getattr(self, k)[idx] for k in self.__dataclass_fields__})


def pack_from_riemann(g, ginv, gamma, riem):
    rm = np.einsum("...ijkm,...ml->...ijkl", riem, g)
    ric, sc, ein = einstein_from_riemann(g, ginv, riem)
    root, iroot = sqrtm_spd(g)
    s = np.einsum("...ia,...ab,...bj->...ij", iroot, ein, iroot)
    lam, q = np.linalg.eigh(0.5 * (s + np.swapaxes(s, -1, -2)))
    evecs = np.einsum("...ia,...aj->...ij", iroot, q)
    lowered = np.einsum("...ia,...aj->...ij", root, q)
    cross = np.stack([lam[..., 1] * lam[..., 2], lam[..., 0] * lam[..., 2], lam[..., 0] * lam[..., 1]], axis=-1)
    adj = np.einsum("...ik,...k,...jk->...ij", lowered, cross, lowered)
    detE = lam[..., 0] * lam[..., 1] * lam[..., 2]
    spd = lam[..., 0] > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_lam = np.where(spd[..., None], 1.0 / lam, np.nan)
        V = np.einsum("...ik,...k,...jk->...ij", lowered, inv_lam, lowered)
        Ob = np.sqrt(np.where(spd, detE, np.nan))[..., None, None] * V
    trace_cross = np.einsum("...ij,...ij->...", ginv, adj)
    return CurvaturePack(g=g, ginv=ginv, Gamma=gamma, Riem=riem, Rm=rm, Ric=ric, Sc=sc, Ein=ein, lam=lam,
                         evecs=evecs, adjEin=adj, V=V, detE=detE, Ob=Ob, traceCross=trace_cross,
                         Eup=raise_both(ginv, ein))


def pack_from_jet(g, dg, ddg):
    if not np.all(is_spd(g)):
        raise NonPositiveMetric("metric jet is not positive definite")
    return pack_from_riemann(g, *riemann_from_jet(g, dg, ddg))


def fd_jet(grid, order=2, pad=0):
    """Finite-difference 2-jet on the nodes plus ``pad`` ghost layers."""
    stencil.check_dims(grid.dims, order)
    s = stencil.half_width(order)
    gp = grid.padded(pad + s)
    return stencil.crop(gp, s), stencil.gradient_core(gp, grid.h, order), stencil.hessian_core(gp, grid.h, order)


def analytic_jet(grid, pad=0):
    x = grid.coordinates(pad)
    return grid.family.jet(x, grid.t, grid.variant, grid.K)


def grid_jet(grid, order=2, pad=0, derivatives="stencil"):
    if derivatives == "analytic":
        if grid.family is None or not grid.family.has_jet:
            raise ValueError("analytic derivatives need a family with a closed-form jet")
        return analytic_jet(grid, pad)
    if derivatives != "stencil":
        raise ValueError(f"derivatives must be 'stencil' or 'analytic', got {derivatives!r}")
    return fd_jet(grid, order, pad)


def curvature_pack(grid, stencil_order=2, pad=0, derivatives="stencil"):
    """Curvature on every node of ``grid`` (plus ``pad`` ghost layers).

    Ghost layers come from the analytic family (Dirichlet) or wrap (periodic),
    so boundary nodes get full stencils too.  ``derivatives="analytic"`` uses
    the family's exact jet instead of stencils and is only meaningful for
    grids still carrying their closed-form data.
    """
    grid.check_spd()
    g, dg, ddg = grid_jet(grid, stencil_order, pad, derivatives)
    if pad and grid.boundary != PERIODIC and not np.all(is_spd(g)):
        raise NonPositiveMetric("ghost layer metric not positive definite")
    return pack_from_riemann(g, *riemann_from_jet(g, dg, ddg))


def sectional(pack, i, j):
    """K(E_i ^ E_j) = Rm(E_i, E_j, E_j, E_i) / |E_i ^ E_j|^2 on the opEin eigenframe."""
    if i == j:
        raise DegeneratePlane("sectional curvature needs two distinct axes")
    ei = pack.evecs[..., :, i]
    ej = pack.evecs[..., :, j]
    gii = np.einsum("...a,...ab,...b->...", ei, pack.g, ei)
    gjj = np.einsum("...a,...ab,...b->...", ej, pack.g, ej)
    gij = np.einsum("...a,...ab,...b->...", ei, pack.g, ej)
    area = gii * gjj - gij * gij
    if np.any(area < 1e-14):
        raise DegeneratePlane("eigenframe plane has vanishing area")
    num = np.einsum("...ijkl,...i,...j,...k,...l->...", pack.Rm, ei, ej, ej, ei)
    return num / area


def cross_via_ricciE(pack):
    """-1/2 Tr(Z -> Rm(opEin Z, X) Y), a contraction path with no eigen-decomposition."""
    op = pack.opEin
    return -0.5 * np.einsum("...am,...aijm->...ij", op, pack.Riem)


def ricci_decomposition_model(g, ein):
    """-Ein o g + (Tr opEin / 2) g o g."""
    tr = np.einsum("...ij,...ij->...", inv3(g), ein)
    return -kulkarni_nomizu(ein, g) + 0.5 * tr[..., None, None, None, None] * kulkarni_nomizu(g, g)


def ricci_decomposition_residual(pack, relative=True):
    res = np.max(np.abs(pack.Rm - ricci_decomposition_model(pack.g, pack.Ein)))
    if relative:
        res /= max(np.max(np.abs(pack.Rm)), 1e-300)
    return float(res)


def pack_from_einstein(g, ein):
    """Pack of the algebraic curvature tensor fixed by Ein through the 3D Ricci decomposition."""
    g = np.asarray(g, dtype=float)
    ein = np.asarray(ein, dtype=float)
    rm = ricci_decomposition_model(g, ein)
    ginv = inv3(g)
    riem = np.einsum("...ijkm,...ml->...ijkl", rm, ginv)
    gamma = np.zeros(g.shape[:-2] + (3, 3, 3))
    return pack_from_riemann(g, ginv, gamma, riem)

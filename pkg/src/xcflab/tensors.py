"""Pointwise 3x3 tensor algebra shared by every backend.

All functions broadcast over leading axes, so a field of symmetric matrices is
just an array of shape ``(..., 3, 3)``.  Nothing here calls ``eigh`` unless the
name says so, which keeps the complex-step derivative path usable.
"""

import numpy as np

# storage order of SymMat3 entries: 11, 12, 13, 22, 23, 33
SYM_INDEX = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


def sym_to_vec(m):
    m = np.asarray(m)
    return np.stack([m[..., i, j] for i, j in SYM_INDEX], axis=-1)


def vec_to_sym(v):
    v = np.asarray(v)
    out = np.empty(v.shape[:-1] + (3, 3), dtype=v.dtype)
    for n, (i, j) in enumerate(SYM_INDEX):
        out[..., i, j] = v[..., n]
        out[..., j, i] = v[..., n]
    return out


def sym_basis():
    """The six basis tensors e11, e12, e13, e22, e23, e33 (off-diagonals have 1 in both slots)."""
    return vec_to_sym(np.eye(6))


def symmetrize(m):
    return 0.5 * (m + np.swapaxes(m, -1, -2))


def det3(m):
    return (m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
            - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
            + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0]))


def adj3(m):
    """Adjugate (transposed cofactor matrix); well defined for singular input."""
    a = np.empty_like(m)
    a[..., 0, 0] = m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1]
    a[..., 0, 1] = m[..., 0, 2] * m[..., 2, 1] - m[..., 0, 1] * m[..., 2, 2]
    a[..., 0, 2] = m[..., 0, 1] * m[..., 1, 2] - m[..., 0, 2] * m[..., 1, 1]
    a[..., 1, 0] = m[..., 1, 2] * m[..., 2, 0] - m[..., 1, 0] * m[..., 2, 2]
    a[..., 1, 1] = m[..., 0, 0] * m[..., 2, 2] - m[..., 0, 2] * m[..., 2, 0]
    a[..., 1, 2] = m[..., 0, 2] * m[..., 1, 0] - m[..., 0, 0] * m[..., 1, 2]
    a[..., 2, 0] = m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0]
    a[..., 2, 1] = m[..., 0, 1] * m[..., 2, 0] - m[..., 0, 0] * m[..., 2, 1]
    a[..., 2, 2] = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    return a


def inv3(m):
    return adj3(m) / det3(m)[..., None, None]


def is_spd(m):
    """Leading principal minors test, vectorized."""
    m1 = m[..., 0, 0]
    m2 = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    m3 = det3(m)
    return (m1 > 0) & (m2 > 0) & (m3 > 0)


def sqrtm_spd(m):
    """Symmetric square root and inverse square root of SPD matrices."""
    w, q = np.linalg.eigh(m)
    s = np.sqrt(w)
    root = np.einsum("...ik,...k,...jk->...ij", q, s, q)
    iroot = np.einsum("...ik,...k,...jk->...ij", q, 1.0 / s, q)
    return root, iroot


def kulkarni_nomizu(h, k):
    """(h o k)(X,Y,Z,W) = h(X,Z)k(Y,W) + h(Y,W)k(X,Z) - h(X,W)k(Y,Z) - h(Y,Z)k(X,W).

    With this sign, constant curvature K reads Rm = -(K/2) g o g under the
    convention Rm(X,Y,Y,X) = K |X ^ Y|^2.
    """
    return (np.einsum("...ik,...jl->...ijkl", h, k)
            + np.einsum("...jl,...ik->...ijkl", h, k)
            - np.einsum("...il,...jk->...ijkl", h, k)
            - np.einsum("...jk,...il->...ijkl", h, k))


def raise_both(ginv, t):
    """T^{ij} = g^{ia} g^{jb} T_ab."""
    return ginv @ t @ np.swapaxes(ginv, -1, -2)


def transform_last2(m, t):
    """m_ia m_jb T_..ab on the last two slots of T (staged pairwise contractions)."""
    u = np.einsum("...jb,...ab->...aj", m[..., None, :, :], t)
    return np.einsum("...ia,...aj->...ij", m[..., None, :, :], u)


def norm3(m, t):
    """m_ia m_jb m_kc T^ijk T^abc, summed pairwise instead of as one five-operand einsum."""
    u = np.einsum("...kc,...abc->...abk", m, t)
    u = np.einsum("...jb,...abk->...ajk", m, u)
    u = np.einsum("...ia,...ajk->...ijk", m, u)
    return np.einsum("...ijk,...ijk->...", u, t)


def minkowski_dot(x, y):
    """Signature (+,+,+,-) inner product of 4-vectors on the last axis."""
    return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2] - x[..., 3] * y[..., 3]

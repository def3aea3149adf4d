"""Central finite-difference stencils on padded node arrays.

Every operator returns an array of the input shape; entries whose stencil
would leave the array are NaN, so a too-thin padding shows up loudly instead
of silently wrapping.  Callers crop the valid core with :func:`crop`.
"""

import numpy as np

from .errors import StencilUnderflow

_D1 = {
    2: ((-1, -0.5), (1, 0.5)),
    4: ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12)),
}
_D2 = {
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    4: ((-2, -1.0 / 12), (-1, 16.0 / 12), (0, -30.0 / 12), (1, 16.0 / 12), (2, -1.0 / 12)),
}


def half_width(order):
    if order not in _D1:
        raise ValueError(f"stencil order must be 2 or 4, got {order}")
    return order // 2


def _apply(f, axis, coeffs, scale):
    out = np.zeros_like(f)
    for off, c in coeffs:
        out += c * np.roll(f, -off, axis=axis)
    out *= scale
    s = max(abs(off) for off, _ in coeffs)
    idx = [slice(None)] * f.ndim
    idx[axis] = slice(0, s)
    out[tuple(idx)] = np.nan
    idx[axis] = slice(f.shape[axis] - s, None)
    out[tuple(idx)] = np.nan
    return out


def d1(f, axis, h, order=2):
    """First derivative along one of the three leading (node) axes."""
    return _apply(f, axis, _D1[order], 1.0 / h)


def d2(f, axis, h, order=2):
    return _apply(f, axis, _D2[order], 1.0 / (h * h))


def gradient(f, h, order=2):
    """Stack of the three partials; derivative index inserted right after the node axes."""
    return np.stack([d1(f, a, h[a], order) for a in range(3)], axis=3)


def hessian(f, h, order=2):
    """Second partials ddf[..., a, b, ...], mixed terms from nested first differences."""
    first = [d1(f, a, h[a], order) for a in range(3)]
    rows = []
    for a in range(3):
        row = []
        for b in range(3):
            if a == b:
                row.append(d2(f, a, h[a], order))
            elif b < a:
                row.append(None)
            else:
                row.append(d1(first[b], a, h[a], order))
        rows.append(row)
    for a in range(3):
        for b in range(a):
            rows[a][b] = rows[b][a]
    return np.stack([np.stack(r, axis=3) for r in rows], axis=3)


def _diff_valid(f, axis, coeffs, scale, s):
    n = f.shape[axis]
    out = None
    for off, c in coeffs:
        idx = [slice(None)] * f.ndim
        idx[axis] = slice(s + off, n - s + off)
        term = c * f[tuple(idx)]
        out = term if out is None else out + term
    return out * scale


def _crop_axes(f, s, axes):
    idx = [slice(None)] * f.ndim
    for a in axes:
        idx[a] = slice(s, f.shape[a] - s)
    return f[tuple(idx)]


def gradient_core(f, h, order=2):
    """Like :func:`gradient` but only on the core that has full stencils (shrunk by the half-width)."""
    s = half_width(order)
    parts = []
    for a in range(3):
        d = _diff_valid(f, a, _D1[order], 1.0 / h[a], s)
        parts.append(_crop_axes(d, s, [b for b in range(3) if b != a]))
    return np.stack(parts, axis=3)


def hessian_core(f, h, order=2):
    """Like :func:`hessian` restricted to the core; mixed terms from nested first differences."""
    s = half_width(order)
    first = [_diff_valid(f, b, _D1[order], 1.0 / h[b], s) for b in range(3)]
    out = np.empty(tuple(n - 2 * s for n in f.shape[:3]) + (3, 3) + f.shape[3:], dtype=f.dtype)
    for a in range(3):
        d = _diff_valid(f, a, _D2[order], 1.0 / (h[a] * h[a]), s)
        out[:, :, :, a, a] = _crop_axes(d, s, [b for b in range(3) if b != a])
        for b in range(a + 1, 3):
            m = _diff_valid(first[b], a, _D1[order], 1.0 / h[a], s)
            m = _crop_axes(m, s, [c for c in range(3) if c not in (a, b)])
            out[:, :, :, a, b] = m
            out[:, :, :, b, a] = m
    return out


def crop(f, p):
    if p == 0:
        return f
    return f[p:-p, p:-p, p:-p]


def check_dims(dims, order):
    s = half_width(order)
    if min(dims) < 2 * s + 1 or min(dims) < 5:
        raise StencilUnderflow(f"grid {tuple(dims)} too small for order-{order} stencils")

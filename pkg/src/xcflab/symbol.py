"""Principal symbols on symmetric 2-tensors as 6x6 matrices.

The basis is {e11, e12, e13, e22, e23, e33}; off-diagonal basis tensors carry
a 1 in both slots, so the coordinates of a symmetric matrix S are its six
upper-triangle entries.  Sym(a (x) b) = (a (x) b + b (x) a) / 2.

The symbol of an operator P is read off by replacing d_i d_j with xi_i xi_j in
its linearization.  symbol_xcf is the symbol of the XCF speed 2 adj Ein.
"""

from dataclasses import dataclass

import numpy as np

from .curvature import adjugate_cross, einstein_from_jet
from .errors import NonConvergentExtraction, ZeroCovector
from .tensors import inv3, raise_both, sym_basis, sym_to_vec

BASIS = sym_basis()


@dataclass
class SymbolMatrix:
    M: np.ndarray
    g: np.ndarray
    E: np.ndarray
    xi: np.ndarray

    def apply(self, V):
        return self.M @ sym_to_vec(np.asarray(V, dtype=float))

    def kernel_dim(self, rtol=1e-9):
        s = np.linalg.svd(self.M, compute_uv=False)
        return int(np.sum(s <= rtol * s[0]))

    def eigenvalues(self):
        return np.linalg.eigvals(self.M)


def _matrix(op):
    return np.stack([sym_to_vec(op(B)) for B in BASIS], axis=1)


def _sym(a, b):
    return 0.5 * (np.outer(a, b) + np.outer(b, a))


def _check_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if not np.any(xi != 0):
        raise ZeroCovector("symbol needs a nonzero covector")
    return xi


def _parts(g, E, xi):
    g = np.asarray(g, dtype=float)
    E = np.asarray(E, dtype=float)
    xi = _check_xi(xi)
    ginv = inv3(g)
    Eup = raise_both(ginv, E)
    return g, E, xi, ginv, Eup


def symbol_xcf(g, E, xi):
    """|xi|^2_E V - 2 Sym xi (x) V(#_E xi, .) + Tr_E V xi (x) xi, with E^ij = g^ia g^jb Ein_ab."""
    g, E, xi, ginv, Eup = _parts(g, E, xi)
    sharp_e = Eup @ xi
    n2 = xi @ sharp_e
    op = lambda V: n2 * V - 2.0 * _sym(xi, V @ sharp_e) + np.sum(Eup * V) * np.outer(xi, xi)
    return SymbolMatrix(_matrix(op), g, E, xi)


def symbol_gauge(g, xi):
    """Symbol of the DeTurck Lie-derivative term: 2 Sym xi (x) V(#xi, .) - Tr_g V xi (x) xi."""
    g = np.asarray(g, dtype=float)
    xi = _check_xi(xi)
    ginv = inv3(g)
    sharp = ginv @ xi
    op = lambda V: 2.0 * _sym(xi, V @ sharp) - np.sum(ginv * V) * np.outer(xi, xi)
    return SymbolMatrix(_matrix(op), g, None, xi)


def symbol_deturck(g, E, xi):
    """|xi|^2_E V + 2 Sym xi (x) V(#xi - #_E xi, .) + (Tr_E V - Tr_g V) xi (x) xi."""
    g, E, xi, ginv, Eup = _parts(g, E, xi)
    sharp_e = Eup @ xi
    sharp = ginv @ xi
    n2 = xi @ sharp_e
    op = lambda V: (n2 * V + 2.0 * _sym(xi, V @ (sharp - sharp_e))
                    + (np.sum(Eup * V) - np.sum(ginv * V)) * np.outer(xi, xi))
    return SymbolMatrix(_matrix(op), g, E, xi)


def symbol_ricci(g, xi):
    """(raw, deturck) symbols of -2 Ric and of the Ricci-DeTurck operator."""
    g = np.asarray(g, dtype=float)
    xi = _check_xi(xi)
    ginv = inv3(g)
    sharp = ginv @ xi
    n2 = xi @ sharp
    raw = lambda V: n2 * V - 2.0 * _sym(xi, V @ sharp) + np.sum(ginv * V) * np.outer(xi, xi)
    return SymbolMatrix(_matrix(raw), g, None, xi), SymbolMatrix(n2 * np.eye(6), g, None, xi)


def gauge_from_ricci(g, xi):
    """Gauge symbol recovered as the Ricci-DeTurck minus raw Ricci symbol."""
    raw, dt = symbol_ricci(g, xi)
    return SymbolMatrix(dt.M - raw.M, g, None, xi)


# -- finite-difference linearization oracle ------------------------------------------

def xcf_speed_from_jet(g, dg, ddg):
    return 2.0 * adjugate_cross(g, einstein_from_jet(g, dg, ddg))


def symbol_context(family, x0, t=0.0):
    """(g, Ein) of a family at one chart point, from its exact jet."""
    g, dg, ddg = family.jet(np.asarray(x0, dtype=float), t)
    return g, einstein_from_jet(g, dg, ddg)


def symbol_fd_oracle(family, x0, xi, V, amplitudes=(1e-3, 5e-4, 2.5e-4), deltas=(0.2, 0.1), rtol=1e-5):
    """Estimate sigma_xi(V) for the XCF speed by linearizing it on a plane wave.

    At x0 the wave u = V cos(<xi, x - x0> / delta) has 2-jet (V, 0, -V xi xi / delta^2).
    The linearization is taken by central differences in the amplitude (Richardson
    over ``amplitudes``), then delta^2 times it is extrapolated to delta -> 0
    (it is exactly affine in delta^2).  Returns the estimated column as a
    6-vector in the symmetric basis.
    """
    amps = [float(a) for a in amplitudes]
    if len(amps) < 2 or any(b >= a for a, b in zip(amps, amps[1:])) or amps[-1] <= 0:
        raise NonConvergentExtraction("amplitudes must be a strictly decreasing positive list")
    dels = [float(d) for d in deltas]
    if len(dels) < 2 or any(b >= a for a, b in zip(dels, dels[1:])):
        raise NonConvergentExtraction("deltas must be a strictly decreasing list")
    xi = _check_xi(xi)
    V = np.asarray(V, dtype=float)
    g, dg, ddg = family.jet(np.asarray(x0, dtype=float), 0.0)

    def linearized(a, delta):
        # perturbation scaled by delta^2 keeps the jet change O(a)
        s = a * delta * delta
        pg, pdd = s * V, -a * np.einsum("i,j,kl->ijkl", xi, xi, V)
        up = xcf_speed_from_jet(g + pg, dg, ddg + pdd)
        dn = xcf_speed_from_jet(g - pg, dg, ddg - pdd)
        return (up - dn) / (2.0 * a)   # = delta^2 * L(u)

    coeffs = []
    for delta in dels:
        ests = [linearized(a, delta) for a in amps]
        rich = [est_b + (est_b - est_a) / ((a / b) ** 2 - 1.0)
                for (a, est_a), (b, est_b) in zip(zip(amps, ests), zip(amps[1:], ests[1:]))]
        scale = max(float(np.max(np.abs(rich[-1]))), 1e-12)
        if len(rich) > 1 and np.max(np.abs(rich[-1] - rich[-2])) > rtol * scale:
            raise NonConvergentExtraction("amplitude sequence has not settled")
        coeffs.append(rich[-1])
    d0, d1 = dels[-2], dels[-1]
    c0 = (d0 * d0 * coeffs[-1] - d1 * d1 * coeffs[-2]) / (d0 * d0 - d1 * d1)
    # d_i d_j -> -xi_i xi_j on the wave, while the symbol replaces d_i d_j by +xi_i xi_j
    return -sym_to_vec(0.5 * (c0 + c0.T))


# -- random contexts and the sampling report -----------------------------------------

def random_spd(rng, low=0.5, high=2.0):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return (q * rng.uniform(low, high, size=3)) @ q.T


def random_context(rng):
    """Generic (g, Ein, xi) with xi on the unit g-sphere."""
    g = random_spd(rng)
    E = random_spd(rng)
    xi = rng.normal(size=3)
    xi /= np.sqrt(xi @ inv3(g) @ xi)
    return g, E, xi


def sampling_report(samples, seed):
    rng = np.random.default_rng(seed)
    hist = {}
    min_re = np.inf
    min_ratio = np.inf
    failures = []
    for k in range(samples):
        g, E, xi = random_context(rng)
        kd = symbol_xcf(g, E, xi).kernel_dim()
        hist[kd] = hist.get(kd, 0) + 1
        dt = symbol_deturck(g, E, xi)
        re = float(np.min(dt.eigenvalues().real))
        n2e = float(xi @ raise_both(inv3(g), E) @ xi)
        min_re = min(min_re, re)
        min_ratio = min(min_ratio, re / n2e)
        if kd != 3 or not re > 0:
            failures.append({"index": k, "g": sym_to_vec(g).tolist(), "E": sym_to_vec(E).tolist(),
                             "xi": xi.tolist(), "kernel_dim": kd, "min_real_part": re})
    return {
        "samples": int(samples),
        "seed": int(seed),
        "xcf_kernel_dim_histogram": {str(k): hist[k] for k in sorted(hist)},
        "deturck_min_real_part": min_re,
        "deturck_min_real_part_over_xi_E2": min_ratio,
        "failures": failures,
    }

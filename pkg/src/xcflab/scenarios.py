"""Named standard setups shared by the verification suites, the CLI and the tests.

Every setup is described in plain chart units.  The perturbed runs use the
Poincare ball chart with a compactly supported shear bump at the origin; the
box is large enough that the bump (and its spread over the run) stays clear
of the Dirichlet boundary, so the boundary data is the true flow there.
"""

import math

import numpy as np

from .families import HyperbolicBall, HyperbolicHalfspace, PerturbedHyperbolic
from .flow import FlowState, rhs, cfl_dt, run, step
from .grid import MetricGrid

H_STANDARD = 1.0 / 32.0

# standard perturbed raw run
PERTURBED = dict(K0=-0.25, eps=0.05, bump_width=0.45, nodes=33, h=H_STANDARD, t_end=0.05, dt=5e-3,
                 stencil_order=4, balanced=True)

# smooth anisotropic field for refinement studies: half-space chart, gaussian bump at (0, 0, 1.5)
REFINE_CENTER = (0.0, 0.0, 1.5)
REFINE_HALF_WIDTH = 0.375


def perturbed_family(eps=PERTURBED["eps"], K0=PERTURBED["K0"]):
    return PerturbedHyperbolic(K0=K0, eps=eps, bump_width=PERTURBED["bump_width"])


def perturbed_grid(eps=PERTURBED["eps"], K0=PERTURBED["K0"], nodes=PERTURBED["nodes"], h=PERTURBED["h"]):
    return MetricGrid.centered(perturbed_family(eps, K0), nodes, h)


def background_grid(K0=PERTURBED["K0"], nodes=PERTURBED["nodes"], h=PERTURBED["h"]):
    """Constant-curvature counterpart of the standard perturbed grid."""
    return MetricGrid.centered(HyperbolicBall(K0), nodes, h)


def standard_run(grid=None, monitor=True):
    """Raw XCF from the standard perturbed data (or ``grid``) with the standard settings."""
    p = PERTURBED
    grid = perturbed_grid() if grid is None else grid
    state = FlowState.initial(grid, balanced=p["balanced"], stencil_order=p["stencil_order"])
    return run(state, p["t_end"], p["dt"], stencil_order=p["stencil_order"], monitor=monitor)


def refinement_family(eps=0.05):
    shape = 0.3 * np.asarray(PerturbedHyperbolic.DEFAULT_SHAPE)
    return PerturbedHyperbolic(K0=-1.0, eps=eps, bump_center=REFINE_CENTER, bump_width=0.3,
                               chart="halfspace", profile="gaussian", shape=shape)


def refinement_grid(family, h):
    """Box of half-width 0.375 around (0, 0, 1.5) at spacing h."""
    n = int(round(2 * REFINE_HALF_WIDTH / h)) + 1
    return MetricGrid.centered(family, n, h, center=REFINE_CENTER)


def halfspace_grid(h, K0=-1.0):
    return refinement_grid(HyperbolicHalfspace(K0), h)


def hyperbolic_ball_grid(h=H_STANDARD, K0=-1.0, half_width=0.375):
    n = int(round(2 * half_width / h)) + 1
    return MetricGrid.centered(HyperbolicBall(K0), n, h)


def cfl_step(state, order, variant="raw", K=None):
    _, info = rhs(state, variant, K, order, with_info=True)
    return cfl_dt(info, state.metric.h)


def three_states(grid, order=2, balanced=False):
    """Initial state and two CFL steps, for centered evolution residuals."""
    s0 = FlowState.initial(grid, balanced=balanced, stencil_order=order)
    dt = cfl_step(s0, order)
    s1 = step(s0, dt, stencil_order=order)
    s2 = step(s1, dt, stencil_order=order)
    return s0, s1, s2


def hyperbolic_scale(K0, t):
    return math.sqrt(4.0 * K0 * K0 * t + 1.0)

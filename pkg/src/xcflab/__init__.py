"""Numerical laboratory for the cross curvature flow of negatively curved 3-metrics.

Two backends share one set of curvature kernels: sampled metrics on a box
(finite differences, method of lines) and left-invariant metrics on 3D Lie
groups (exact curvature, matrix ODE).
"""

from .curvature import CurvaturePack, adjugate_cross, cross_via_ricciE, curvature_pack, pack_from_jet, sectional
from .errors import (CflViolation, ConfigError, DegeneratePlane, EinDegenerate, JacobiViolation, MismatchedGrids,
                     NonConvergentExtraction, NonPositiveEin, NonPositiveMetric, NonSymmetricA, StencilUnderflow,
                     XcfError, ZeroCovector)
from .families import (HyperbolicBall, HyperbolicHalfspace, PeriodicSynthetic, PerturbedHyperbolic, SolvableChart,
                       family_from_dict, scale_factor)
from .flow import FlowState, deturck_rhs, normalized_rhs, run, step, xcf_rhs
from .frame import FrameMetric, frame_curvature, frame_third_order, xcf_ode_run
from .grid import DIRICHLET, PERIODIC, MetricGrid
from .minkowski import (EmbeddingState, gauss_residual, gcf_xcf_correspondence, integrate_embedding, is_integrable,
                        weingarten_from_intrinsic)
from .monitors import COLUMNS, MonitorRow, evolution_residuals, monitors
from .symbol import SymbolMatrix, symbol_deturck, symbol_fd_oracle, symbol_gauge, symbol_ricci, symbol_xcf
from .third_order import ThirdOrderField, bianchi_cross_residual, third_order

__version__ = "0.1.0"

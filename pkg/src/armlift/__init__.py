"""Horizontal lifting and holonomy for planar and spherical articulated arms.

The package turns end-effector paths into joint trajectories that move each
segment as little as possible (the horizontal lift of the arm map), measures
the holonomy picked up around closed target loops, classifies the critical
points of the angle-sum function on level sets, and decides reachability of
one configuration from another under the conformal symmetry group of the arm.

The steering service (``armlift.service``) and the CLI (``armlift.cli``) are
thin layers over the functions exported here.
"""

from .arm import (
    ArmSpec,
    Configuration,
    GramMatrix,
    critical_radii,
    det_gram_closed_form,
    eval_arm,
    gram,
    is_aligned,
    is_regular_value,
    nearest_critical_distance,
    two_link_solutions,
)
from .curves import Arc, CurveSpec, Polyline, SquareLoop
from .errors import (
    ArmError,
    DimensionMismatch,
    IndeterminateIndex,
    NearCritical,
    NotAtBasepoint,
    OrientationMismatch,
    TrackingDiverged,
)
from .fields import lie_bracket_numeric, planar_field
from .holonomy import (
    HolonomyReport,
    commutator_estimate,
    holonomy_map,
    horizontal_frame_fields,
)
from .lift import (
    DriftReport,
    LiftOptions,
    LiftTrajectory,
    horizontal_vector,
    lift_path,
    monitor_invariants,
)
from .moebius import (
    GroupElement,
    SU11Algebra,
    SU11Element,
    act_group,
    cross_ratio,
    cross_ratio_complex,
    cross_ratio_weak,
    flow_gamma,
    flow_gamma_planar,
    gamma_element,
    moebius_through_triple,
    orientation,
    su11_exp,
)
from .morse import (
    CriticalPoint,
    block_hessian_model,
    chart_hessian,
    chart_map,
    critical_points,
    curvature_scales,
    euler_characteristic,
    grad_rho_b,
    morse_census,
    morse_index,
    rho,
    rho_lift,
)
from .reach import ClassReport, ReachVerdict, reachable

__version__ = "0.1.0"

__all__ = [
    "ArmSpec",
    "Configuration",
    "GramMatrix",
    "critical_radii",
    "det_gram_closed_form",
    "eval_arm",
    "gram",
    "is_aligned",
    "is_regular_value",
    "nearest_critical_distance",
    "two_link_solutions",
    "Arc",
    "CurveSpec",
    "Polyline",
    "SquareLoop",
    "ArmError",
    "DimensionMismatch",
    "IndeterminateIndex",
    "NearCritical",
    "NotAtBasepoint",
    "OrientationMismatch",
    "TrackingDiverged",
    "lie_bracket_numeric",
    "planar_field",
    "HolonomyReport",
    "commutator_estimate",
    "holonomy_map",
    "horizontal_frame_fields",
    "DriftReport",
    "LiftOptions",
    "LiftTrajectory",
    "horizontal_vector",
    "lift_path",
    "monitor_invariants",
    "GroupElement",
    "SU11Algebra",
    "SU11Element",
    "act_group",
    "cross_ratio",
    "cross_ratio_complex",
    "cross_ratio_weak",
    "flow_gamma",
    "flow_gamma_planar",
    "gamma_element",
    "moebius_through_triple",
    "orientation",
    "su11_exp",
    "CriticalPoint",
    "block_hessian_model",
    "chart_hessian",
    "chart_map",
    "critical_points",
    "curvature_scales",
    "euler_characteristic",
    "grad_rho_b",
    "morse_census",
    "morse_index",
    "rho",
    "rho_lift",
    "ClassReport",
    "ReachVerdict",
    "reachable",
    "__version__",
]

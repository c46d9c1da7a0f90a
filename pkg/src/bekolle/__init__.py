"""Numerical laboratory for weighted estimates of the Bergman projection
on the upper half-plane: shifted dyadic grids, tile calculus, box
characteristics, positive model operators, the extrapolation iteration,
and the sharpness experiments behind them.
"""

from .extrapolation import (
    ClaimReport,
    ExtrapolationConfig,
    ExtrapolationError,
    check_joint_claim,
    config_for,
    phi,
    rdf_algorithm,
    s_operator,
)
from .experiments import (
    DEFAULT_DELTAS,
    DominationReport,
    FitResult,
    SharpInstance,
    SweepRecord,
    angle_formula,
    angle_threshold,
    closed_form_f_norm,
    delta_sweep,
    domination_experiment,
    fit_power_law,
    pf_norm_lower,
    sharp_instance,
    span_violations,
)
from .geometry import (
    BETAS,
    CarlesonBox,
    DyadicInterval,
    GridWindow,
    Interval,
    Point,
    covering_interval,
    full_box,
    grid_intervals,
    locate_tile,
    top_half,
)
from .measure import AlphaMeasure, Exponents, alpha_area
from .operators import (
    apply_bergman,
    apply_dyadic,
    apply_pplus,
    dyadic_action,
    dyadic_maximal,
    kernel_bergman,
    kernel_dyadic,
    kernel_plus,
    maximal_alpha,
    weight_tiles,
)
from .quadrature import QuadratureError, QuadratureSpec
from .tiles import GridLayout, TileFunction, load_tile_file, save_tile_file
from .weights import (
    BoxFamily,
    ConstantWeight,
    FamilyReport,
    NormResult,
    PowerWeight,
    StepWeight,
    TileTableWeight,
    Weight,
    bekolle_constant,
    bekolle_ratio,
    bekolle_report,
    dual_weight,
    joint_b2_constant,
    load_weight_table,
    lp_norm,
    parse_weight,
    save_weight_table,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaMeasure",
    "BETAS",
    "BoxFamily",
    "CarlesonBox",
    "ClaimReport",
    "ConstantWeight",
    "DEFAULT_DELTAS",
    "DominationReport",
    "DyadicInterval",
    "Exponents",
    "ExtrapolationConfig",
    "ExtrapolationError",
    "FamilyReport",
    "FitResult",
    "GridLayout",
    "GridWindow",
    "Interval",
    "NormResult",
    "Point",
    "PowerWeight",
    "QuadratureError",
    "QuadratureSpec",
    "SharpInstance",
    "StepWeight",
    "SweepRecord",
    "TileFunction",
    "TileTableWeight",
    "Weight",
    "alpha_area",
    "angle_formula",
    "angle_threshold",
    "apply_bergman",
    "apply_dyadic",
    "apply_pplus",
    "bekolle_constant",
    "bekolle_ratio",
    "bekolle_report",
    "check_joint_claim",
    "closed_form_f_norm",
    "config_for",
    "covering_interval",
    "delta_sweep",
    "domination_experiment",
    "dual_weight",
    "dyadic_action",
    "dyadic_maximal",
    "fit_power_law",
    "full_box",
    "grid_intervals",
    "joint_b2_constant",
    "kernel_bergman",
    "kernel_dyadic",
    "kernel_plus",
    "load_tile_file",
    "load_weight_table",
    "locate_tile",
    "lp_norm",
    "maximal_alpha",
    "parse_weight",
    "pf_norm_lower",
    "phi",
    "rdf_algorithm",
    "s_operator",
    "save_tile_file",
    "save_weight_table",
    "sharp_instance",
    "span_violations",
    "top_half",
    "weight_tiles",
]

"""Gradient flows of convex functions on possibly asymmetric normed spaces,
with contraction diagnostics and counterexample scenarios."""

__version__ = "0.1.0"

from .norms import (
    AxiomReport,
    MetricTensor,
    NonConvergenceError,
    NonsmoothPointError,
    NormDescriptor,
    dual_norm_by_maximization,
    parse_space,
)
from .functions import (
    AmbiguousDifferentialError,
    MaxAffine,
    Quadratic,
    Scaled,
    SubdifferentialFace,
    active_set,
    differential,
    k_modulus,
    min_dual_subgradient,
    parse_function,
    scale,
)
from .flow import (
    EDIReport,
    Trajectory,
    edi_residual,
    integrate,
    integrate_max_affine,
    integrate_smooth,
    local_slope,
    metric_derivative,
    steepest_velocity,
)
from .contraction import (
    BestConstantEstimate,
    ContractionReport,
    DegenerateFlag,
    DistanceProfile,
    check_contraction,
    check_k_contraction,
    commutativity_defect,
    distance_profile,
    estimate_best_constant,
    first_variation_check,
    monotonicity_gap,
    scaling_reparam_residual,
)
from .scenarios import (
    Scenario,
    ScenarioPair,
    Witness,
    run_scenario,
    search_witness,
    step1_scenario,
    step2_scenario,
    step3_tangency_scan,
    step4_scenario,
)

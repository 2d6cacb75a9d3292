"""Ampleness criteria for vector bundles on compact complex surfaces."""

from .bundles import BundleExpr, ChernData, Dual, Line, Sum, Twist, chern_of, is_semistable_split, rank_of, split_slopes
from .config import RunConfig, config_from_mapping, parse_config
from .criteria import (
    Assertions,
    Counterexample,
    CriterionReport,
    NakaiReport,
    build_counterexample,
    check_criterion,
    check_rank2_criterion,
    epsilon_choice,
    lubke_coefficient,
    nakai_check,
)
from .curvature import (
    PointCurvature,
    PointwiseGapResult,
    chern_densities,
    error_term_density,
    lagrange_max,
    lagrange_max_numeric,
    lubke_constant,
    pointwise_gap,
    projectively_flat,
    residuals,
    sample_curvature,
    unitary_conjugate,
    validate,
    wedge_density,
)
from .errors import AmpleError, ConfigError, InconsistentStateError, InvalidInputError
from .intersection import CohClass, SurfaceRing, as_rational, evaluate_on_X, intersect, ring_mul
from .spheremin import MinGapResult, griffiths_min, min_gap_over_v
from .sweep import (
    LagrangeCheckResult,
    SweepConfig,
    SweepResult,
    export_histograms,
    replay_worst,
    run_gap_sweep,
    run_griffiths_sweep,
    run_lagrange_check,
)

__version__ = "0.1.0"

__all__ = [
    "AmpleError",
    "Assertions",
    "BundleExpr",
    "ChernData",
    "CohClass",
    "ConfigError",
    "Counterexample",
    "CriterionReport",
    "Dual",
    "InconsistentStateError",
    "InvalidInputError",
    "LagrangeCheckResult",
    "Line",
    "MinGapResult",
    "NakaiReport",
    "PointCurvature",
    "PointwiseGapResult",
    "RunConfig",
    "Sum",
    "SurfaceRing",
    "SweepConfig",
    "SweepResult",
    "Twist",
    "as_rational",
    "build_counterexample",
    "check_criterion",
    "check_rank2_criterion",
    "chern_densities",
    "chern_of",
    "config_from_mapping",
    "epsilon_choice",
    "error_term_density",
    "evaluate_on_X",
    "export_histograms",
    "griffiths_min",
    "intersect",
    "is_semistable_split",
    "lagrange_max",
    "lagrange_max_numeric",
    "lubke_coefficient",
    "lubke_constant",
    "min_gap_over_v",
    "nakai_check",
    "parse_config",
    "pointwise_gap",
    "projectively_flat",
    "rank_of",
    "replay_worst",
    "residuals",
    "ring_mul",
    "run_gap_sweep",
    "run_griffiths_sweep",
    "run_lagrange_check",
    "sample_curvature",
    "split_slopes",
    "unitary_conjugate",
    "validate",
    "wedge_density",
    "__version__",
]

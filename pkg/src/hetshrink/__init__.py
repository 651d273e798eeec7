"""Minimax shrinkage estimation for heteroscedastic normal means.

Point estimation of a multivariate normal mean when the coordinate
variances differ: optimal shrinkage directions, a family of minimax and
Bayes-flavored estimators behind a common fit/transform API, closed-form
risk bounds, and a reproducible Monte Carlo risk harness.
"""

__version__ = "0.1.0"

from .errors import (
    AlphaBelowFloorError,
    ConditionA2ViolatedError,
    ConditionAViolatedError,
    ConfigurationError,
    DimensionTooSmallError,
    NegativeCStarError,
    NonPositiveVarianceError,
    NotPositiveDefiniteError,
    ShrinkageError,
    UnknownConfigError,
)
from .model import (
    ALTERNATIVE_KINDS,
    FLAT_PRIOR,
    Direction,
    EstimatorSpec,
    PriorSpec,
    ProblemSpec,
    ValidationReport,
    effective_gamma,
    validate_problem,
)
from .canonical import (
    Factorization,
    c_star_general,
    check_condition_a,
    check_condition_a2,
    factor_problem,
    map_direction,
    symmetric_sqrt,
    to_canonical_direction,
)
from .direction import (
    DirectionSolution,
    bayes_importance,
    find_cutoff,
    m_sequence,
    max_value_diagnostic,
    solve_direction,
)
from .bounds import (
    BoundReport,
    bayes_proximity_bound,
    bayes_risk_of_bayes_rule,
    bayes_upper_bound,
    block_l_sequence,
    c_star_canonical,
    corollary4_bound,
    inverse_moment_lower_bound,
    mb2_bayes_risk,
    theorem3_bounds,
    theorem4_bounds,
    worst_case_bound,
)
from .estimators import (
    BayesRule,
    BlockShrinkage,
    DirectionalShrinkage,
    EmpiricalBayes,
    Estimate,
    IdentityEstimator,
    InverseVarianceShrinkage,
    JamesStein,
    MinimaxBayes,
    PositivePartShrinkage,
    REGISTRY,
    RobustBayes,
    ShrinkageEstimator,
    SphericalShrinkage,
    SureShrinkage,
    available_estimators,
    build_estimator,
    spherical_minimax_range,
    sure_objective,
)
from .risk import (
    CHUNK,
    RiskCurve,
    SteinIdentityReport,
    VarianceConfig,
    bayes_risk,
    chi2_quantile,
    gamma_path,
    list_variance_configs,
    pointwise_risk,
    risk_curve,
    stein_identity_check,
    theta_path,
    variance_config,
)
from .config import (
    CurveSection,
    ScenarioConfig,
    list_presets,
    load_config,
    parse_prior,
    resolve_config,
)

__all__ = [
    "__version__",
    # errors
    "ShrinkageError",
    "ConfigurationError",
    "UnknownConfigError",
    "NonPositiveVarianceError",
    "NotPositiveDefiniteError",
    "DimensionTooSmallError",
    "NegativeCStarError",
    "ConditionAViolatedError",
    "ConditionA2ViolatedError",
    "AlphaBelowFloorError",
    # problem model
    "ProblemSpec",
    "PriorSpec",
    "Direction",
    "EstimatorSpec",
    "ValidationReport",
    "FLAT_PRIOR",
    "ALTERNATIVE_KINDS",
    "effective_gamma",
    "validate_problem",
    # canonical reduction
    "Factorization",
    "factor_problem",
    "symmetric_sqrt",
    "map_direction",
    "to_canonical_direction",
    "check_condition_a",
    "check_condition_a2",
    "c_star_general",
    # direction solver
    "DirectionSolution",
    "solve_direction",
    "bayes_importance",
    "m_sequence",
    "find_cutoff",
    "max_value_diagnostic",
    # bounds
    "BoundReport",
    "c_star_canonical",
    "bayes_upper_bound",
    "worst_case_bound",
    "theorem3_bounds",
    "theorem4_bounds",
    "bayes_proximity_bound",
    "bayes_risk_of_bayes_rule",
    "corollary4_bound",
    "mb2_bayes_risk",
    "block_l_sequence",
    "inverse_moment_lower_bound",
    # estimators
    "Estimate",
    "ShrinkageEstimator",
    "IdentityEstimator",
    "BayesRule",
    "JamesStein",
    "EmpiricalBayes",
    "SureShrinkage",
    "SphericalShrinkage",
    "InverseVarianceShrinkage",
    "RobustBayes",
    "MinimaxBayes",
    "DirectionalShrinkage",
    "PositivePartShrinkage",
    "BlockShrinkage",
    "REGISTRY",
    "available_estimators",
    "build_estimator",
    "spherical_minimax_range",
    "sure_objective",
    # risk harness
    "CHUNK",
    "pointwise_risk",
    "bayes_risk",
    "risk_curve",
    "RiskCurve",
    "theta_path",
    "gamma_path",
    "VarianceConfig",
    "variance_config",
    "list_variance_configs",
    "chi2_quantile",
    "stein_identity_check",
    "SteinIdentityReport",
    # configuration
    "ScenarioConfig",
    "CurveSection",
    "load_config",
    "resolve_config",
    "list_presets",
    "parse_prior",
]

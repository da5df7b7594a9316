"""Distributionally robust minimum-MSE estimation under moment ambiguity.

The library solves the minimax estimation problem in which the state and
noise moments are only known to lie within Gelbrich balls around nominal
values.  The covariance-side concave program is maximized by Frank-Wolfe
iterations whose direction-finding step has a quasi-closed form; the optimal
covariance pair yields the robust affine estimator, its least favorable
prior, and a certified duality gap.  Linear SDP reformulations can be
exported for independent cross-checking.
"""

from .errors import (
    DimensionMismatch,
    DrmmseError,
    InvalidConfig,
    InvalidGradient,
    InvalidInput,
    NotPositiveDefinite,
    NotPsd,
    OutOfDomain,
    UncenteredIntercept,
)
from .gelbrich import (
    AmbiguityBall,
    MomentPair,
    cov_constraint_value,
    feas_tol,
    gelbrich_distance,
    product_gelbrich_sq,
    trace_bound,
)
from .dual_solver import (
    VARIANTS,
    CovariancePair,
    FwConfig,
    FwIteration,
    ProblemInstance,
    RegularityConstants,
    SolveReport,
    closed_form_inner_max,
    fw_solve,
    gradients,
    hessian_quadratic_form,
    objective_f,
    oracle_linmax,
    phi_and_derivative,
    regularity_constants,
)
from .estimator import (
    AffineEstimator,
    NashSolution,
    average_risk,
    nash_estimator,
    nominal_bayes,
    primal_objective_gamma,
    solve_nash,
    worst_case_risk,
)
from .experiments import (
    BenchmarkRow,
    InstanceRecipe,
    RegretRow,
    benchmark_scalability,
    default_rho_grid,
    gen_random_covariance,
    instance_from_recipe,
    make_rng,
    regret_experiment,
    sample_covariance,
    summarize_benchmark,
    summarize_regret,
)
from .sdp_export import (
    SdpProblem,
    dual_feasible_embedding,
    emit_dual_sdp,
    emit_primal_sdp,
    feasibility_margins,
    instance_digest,
    objective_value,
    parse_dat_s,
    render_dat_s,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "DrmmseError",
    "InvalidInput",
    "DimensionMismatch",
    "NotPsd",
    "NotPositiveDefinite",
    "InvalidGradient",
    "OutOfDomain",
    "InvalidConfig",
    "UncenteredIntercept",
    # moment geometry
    "MomentPair",
    "AmbiguityBall",
    "gelbrich_distance",
    "product_gelbrich_sq",
    "cov_constraint_value",
    "trace_bound",
    "feas_tol",
    # solver
    "VARIANTS",
    "ProblemInstance",
    "CovariancePair",
    "FwConfig",
    "FwIteration",
    "SolveReport",
    "RegularityConstants",
    "objective_f",
    "gradients",
    "hessian_quadratic_form",
    "phi_and_derivative",
    "closed_form_inner_max",
    "oracle_linmax",
    "regularity_constants",
    "fw_solve",
    # estimator
    "AffineEstimator",
    "NashSolution",
    "nominal_bayes",
    "nash_estimator",
    "average_risk",
    "worst_case_risk",
    "primal_objective_gamma",
    "solve_nash",
    # experiments
    "InstanceRecipe",
    "BenchmarkRow",
    "RegretRow",
    "make_rng",
    "gen_random_covariance",
    "sample_covariance",
    "instance_from_recipe",
    "benchmark_scalability",
    "summarize_benchmark",
    "regret_experiment",
    "summarize_regret",
    "default_rho_grid",
    # SDP export
    "SdpProblem",
    "emit_primal_sdp",
    "emit_dual_sdp",
    "render_dat_s",
    "parse_dat_s",
    "instance_digest",
    "dual_feasible_embedding",
    "feasibility_margins",
    "objective_value",
]

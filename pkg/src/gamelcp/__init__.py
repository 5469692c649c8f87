"""Discounted turn-based stochastic games, their LCP reduction, and
conditioning certificates."""

from ._kernels import BACKEND, SingularMatrixError
from .bench import BenchRow, fit_loglog_slope, random_game, run_bench
from .conditioning import (
    CertifyOptions,
    ConditioningReport,
    KappaUndefined,
    certify,
    delta_lower_bound,
    estimate_kappa,
    estimate_theta,
    kappa_at,
    kappa_upper_bound,
    pmatrix_check_minors,
    pmatrix_witness_check,
    smallest_eigenvalue_sym,
    theta_at,
    theta_lower_bound,
)
from .game import (
    Action,
    Game,
    GameValidationError,
    State,
    game_from_dict,
    game_to_dict,
    is_optimal,
    load_game,
    matrix_representation,
    reduced_costs,
    restrict,
    save_game,
    validate_game,
    value_vector,
)
from .hard_instances import (
    HardInstanceSpec,
    build_hard_instance,
    closed_forms,
    predicted_eig_ub,
    predicted_kappa_lb,
    predicted_theta_ub,
)
from .lcp import (
    Lcp,
    Partition,
    RecoveryError,
    default_partition,
    load_partition,
    read_lcp,
    recover,
    save_partition,
    to_lcp,
    verify_solution,
    write_lcp,
)
from .lcp_solvers import IpmOptions, IpmTrace, solve_pivoting, solve_potential_reduction
from .solvers import (
    SolveResult,
    SolverFailure,
    brute_force_solve,
    strategy_iteration,
    value_iteration,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BACKEND",
    "BenchRow",
    "CertifyOptions",
    "ConditioningReport",
    "Game",
    "GameValidationError",
    "HardInstanceSpec",
    "IpmOptions",
    "IpmTrace",
    "KappaUndefined",
    "Lcp",
    "Partition",
    "RecoveryError",
    "SingularMatrixError",
    "SolveResult",
    "SolverFailure",
    "State",
    "brute_force_solve",
    "build_hard_instance",
    "certify",
    "closed_forms",
    "default_partition",
    "delta_lower_bound",
    "estimate_kappa",
    "estimate_theta",
    "fit_loglog_slope",
    "game_from_dict",
    "game_to_dict",
    "is_optimal",
    "kappa_at",
    "kappa_upper_bound",
    "load_game",
    "load_partition",
    "matrix_representation",
    "pmatrix_check_minors",
    "pmatrix_witness_check",
    "predicted_eig_ub",
    "predicted_kappa_lb",
    "predicted_theta_ub",
    "random_game",
    "read_lcp",
    "recover",
    "reduced_costs",
    "restrict",
    "run_bench",
    "save_game",
    "save_partition",
    "smallest_eigenvalue_sym",
    "solve_pivoting",
    "solve_potential_reduction",
    "strategy_iteration",
    "theta_at",
    "theta_lower_bound",
    "to_lcp",
    "validate_game",
    "value_iteration",
    "value_vector",
    "verify_solution",
    "write_lcp",
]

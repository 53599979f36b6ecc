"""Optimal dividend policies under stochastically varying profitability.

Thin python layer over the C++ core: build a model and grid, run penalized
policy iteration, extract the free boundaries, and cross-check with the
closed-form and Monte Carlo oracles.
"""

from divopt._divopt import (
    Boundaries,
    CreditLineSpec,
    DeterministicParams,
    DriftSpec,
    Grid,
    GridSpec,
    IssuanceSpec,
    McEstimate,
    ModelParams,
    SimConfig,
    SolveReport,
    build_grid,
    classify_point,
    default_penalization,
    deterministic_mu_star,
    deterministic_value,
    extract_boundaries,
    interpolate,
    k_continuation,
    logistic_cost,
    policy_iteration,
    run_config_file,
    simulate_policy,
    solve_auxiliary,
    solve_credit_line,
    solve_fixed_issuance,
    solve_proportional_issuance,
    tau0,
    validate_assumptions,
    x_b,
)

__all__ = [
    "Boundaries",
    "CreditLineSpec",
    "DeterministicParams",
    "DriftSpec",
    "Grid",
    "GridSpec",
    "IssuanceSpec",
    "McEstimate",
    "ModelParams",
    "SimConfig",
    "SolveReport",
    "build_grid",
    "classify_point",
    "default_penalization",
    "deterministic_mu_star",
    "deterministic_value",
    "extract_boundaries",
    "interpolate",
    "k_continuation",
    "logistic_cost",
    "policy_iteration",
    "run_config_file",
    "simulate_policy",
    "solve_auxiliary",
    "solve_credit_line",
    "solve_fixed_issuance",
    "solve_proportional_issuance",
    "tau0",
    "validate_assumptions",
    "x_b",
]

__version__ = "0.1.0"

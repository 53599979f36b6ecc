#pragma once

#include <functional>

#include "divopt/analysis.hpp"
#include "divopt/fields.hpp"
#include "divopt/grid.hpp"
#include "divopt/model.hpp"
#include "divopt/solver.hpp"

namespace divopt {

/// Equity issuance costs as functions of profitability: lambda_p is the
/// proportional cost per unit raised, lambda_f the fixed cost per issuance.
struct IssuanceSpec {
    std::function<double(double)> lambda_p;
    std::function<double(double)> lambda_f;  // null means identically zero
};

/// Cost curve decaying from hi to lo around mid: hi - (hi-lo) * logistic((mu-mid)/scale).
std::function<double(double)> logistic_cost(double hi, double lo, double mid, double scale);

struct CreditLineSpec {
    double rho_minus = 0.0;                  // interest charged on negative balances
    std::function<double(double)> x_lower;   // bankruptcy threshold, <= 0
};

struct ExtensionSolution {
    ValueField value;
    PolicyField dividends;
    PolicyField issuance;                        // issuance modes; empty otherwise
    std::vector<std::uint8_t> boundary_issues;   // per column: x = 0 row issues
    Boundaries boundaries;
    SolveReport report;
};

/// Purely proportional issuance costs: controls (ell, iota) in [0, K]^2 where
/// iota injects cash at unit rate for a payoff of -(1 + lambda_p); the x = 0
/// row switches between absorption and issuing against the cell above.
ExtensionSolution solve_proportional_issuance(const ModelParams& model, const Grid& grid,
                                              const IssuanceSpec& spec, double K, double tau,
                                              int max_iter,
                                              const SolverControls* controls = nullptr);

/// Fixed plus proportional issuance costs: the nonlocal intervention
/// sup_i { V(x+i) - (1+lambda_p) i - lambda_f } over grid nodes of the same
/// column, applied at investor-arrival intensity K.
ExtensionSolution solve_fixed_issuance(const ModelParams& model, const Grid& grid,
                                       const IssuanceSpec& spec, double K, double tau, int max_iter,
                                       const SolverControls* controls = nullptr);

/// Credit line: cash may run negative down to x_lower(mu) at interest
/// rho_minus; the grid must span [min x_lower, x_max]. Dividends are only
/// paid from nonnegative balances.
ExtensionSolution solve_credit_line(const ModelParams& model, const Grid& grid,
                                    const CreditLineSpec& spec, double K, double tau, int max_iter,
                                    const SolverControls* controls = nullptr);

}  // namespace divopt

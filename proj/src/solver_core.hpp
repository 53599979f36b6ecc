#pragma once

// Generalized penalized policy iteration shared by the base solver and the
// issuance / credit-line extensions.

#include <cstdint>
#include <vector>

#include "divopt/fields.hpp"
#include "divopt/grid.hpp"
#include "divopt/model.hpp"
#include "divopt/solver.hpp"

namespace divopt::detail {

enum class IssuanceMode { None, Proportional, Fixed };

struct PenalizedProblem {
    const ModelParams* model = nullptr;
    const Grid* grid = nullptr;
    double K = 0.0;
    std::vector<int> ruin_row;   // per column; empty means row 0 everywhere
    double rho_minus = 0.0;      // credit-line interest on negative cash
    bool dividends_below_zero = false;
    IssuanceMode issuance = IssuanceMode::None;
    std::vector<double> lambda_p;  // per column, sized when issuance enabled
    std::vector<double> lambda_f;

    int ruin(int j) const { return ruin_row.empty() ? 0 : ruin_row[j]; }
};

struct PolicyState {
    PolicyField ell;
    PolicyField iota;                      // issuance modes only
    std::vector<int> issue_target;         // per node: target row in column, -1 inactive
    std::vector<std::uint8_t> ruin_issue;  // per column: bankruptcy row issues

    bool operator==(const PolicyState&) const = default;
};

struct CoreResult {
    ValueField value;
    PolicyState policy;
    SolveReport report;
};

PolicyState initial_state(const PenalizedProblem& problem, const PolicyField* ell0);

CoreResult solve_penalized(const PenalizedProblem& problem, PolicyState state,
                           const SolverControls& controls);

}  // namespace divopt::detail

#pragma once

#include <string>
#include <vector>

#include "divopt/closed_form.hpp"
#include "divopt/fields.hpp"
#include "divopt/grid.hpp"
#include "divopt/model.hpp"

namespace divopt {

/// Tolerance constants for the converged-solve invariant suite. grad_const is
/// the C in eps_K = C / K; zero resolves to the default 10 r x_max.
struct InvariantTolerances {
    double monotone = 1e-7;
    double grad_const = 0.0;
    double upper_bound_tol = 0.05;
};

double default_grad_const(const ModelParams& model, const Grid& grid);

struct InvariantReport {
    struct Item {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Item> items;

    bool all() const;
    std::string summary() const;
};

/// Runs the invariant suite on a converged solve: V >= 0, V = 0 at the ruin
/// row, V nondecreasing in x and mu, discrete V_x >= 1 - eps_K, the
/// immediate-liquidation lower bound x - eps_K <= V, the real-option upper
/// bound V <= x + V_a + tol (when V_a is supplied), and monotone operator
/// rows at the converged policy.
InvariantReport check_solution_invariants(const ModelParams& model, const Grid& grid,
                                          const ValueField& value, const PolicyField& policy,
                                          double K, const AuxiliarySolution* va,
                                          const InvariantTolerances& tol = {});

}  // namespace divopt

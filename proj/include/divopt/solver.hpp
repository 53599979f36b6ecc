#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "divopt/fields.hpp"
#include "divopt/grid.hpp"
#include "divopt/model.hpp"

namespace divopt {

enum class HaltReason { Tolerance, PolicyFixed, MaxIter };
std::string to_string(HaltReason reason);

struct SolveReport {
    int iterations = 0;                     // linear solves performed
    std::vector<double> residual_history;   // sup|V_i - V_{i-1}| from the second solve on
    std::vector<double> min_increment_history;  // min over nodes of V_i - V_{i-1}
    HaltReason halt_reason = HaltReason::MaxIter;
    double wall_time_seconds = 0.0;
    std::string linear_solver;

    bool converged() const { return halt_reason != HaltReason::MaxIter; }
};

struct SolverControls {
    double tau = 0.0;  // sup-norm halting tolerance; 0 still halts (policy repeats)
    int max_iter = 200;
    enum class Linear { Auto, Direct, Iterative } linear = Linear::Auto;
    std::ostream* diag = nullptr;
};

struct Solution {
    ValueField value;
    PolicyField policy;
    SolveReport report;
};

/// Default penalization rate tied to the grid resolution: K = 100 / dx.
double default_penalization(const Grid& grid);

/// Policy iteration for the penalized dividend problem: alternately solves the
/// linear system of the current policy and improves the policy node-wise over
/// the bang-bang candidates {0, K} (the residual is affine in the rate, so the
/// interval argmin sits at an endpoint). Ties keep the incumbent control, which
/// makes tau = 0 halt in finitely many iterations.
Solution policy_iteration(const ModelParams& model, const Grid& grid, double K, double tau,
                          int max_iter, const PolicyField& initial_policy);
Solution policy_iteration(const ModelParams& model, const Grid& grid, double K,
                          const SolverControls& controls, const PolicyField& initial_policy);

struct ContinuationResult {
    std::vector<double> ks;
    std::vector<ValueField> values;
    std::vector<SolveReport> reports;
    PolicyField final_policy;
};

/// Solves for each K in an increasing schedule, warm-starting every run from
/// the previous policy (paying nodes restart at the new rate cap).
ContinuationResult k_continuation(const ModelParams& model, const Grid& grid,
                                  const std::vector<double>& k_schedule, double tau, int max_iter,
                                  const SolverControls* controls = nullptr);

}  // namespace divopt

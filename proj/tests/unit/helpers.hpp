#pragma once

#include "divopt/grid.hpp"
#include "divopt/model.hpp"
#include "divopt/solver.hpp"

namespace divopt::test {

// Baseline parameter set used across the suites: r = 0.05, sigma = 0.1,
// rho = 0, OU drift k = 0.5, mu_bar = 0.15, sigma_tilde = 0.3.
inline ModelParams ou_default_model(double sigma_tilde = 0.3, double sigma = 0.1,
                                    double rho = 0.0) {
    return ModelParams(0.05, sigma, rho, DriftSpec::ou(0.5, 0.15, sigma_tilde));
}

inline Grid small_grid(const ModelParams& model, int nx = 81, int nmu = 81) {
    GridSpec spec = GridSpec::defaults_for(model, nx, nmu);
    return build(spec, model);
}

inline Solution solve_defaults(const ModelParams& model, const Grid& grid, double K = 0.0) {
    if (K <= 0.0) K = default_penalization(grid);
    return policy_iteration(model, grid, K, 0.0, 200, PolicyField(grid, 0.0));
}

}  // namespace divopt::test

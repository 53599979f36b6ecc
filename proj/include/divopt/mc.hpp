#pragma once

#include <cstdint>

#include "divopt/analysis.hpp"
#include "divopt/model.hpp"

namespace divopt {

struct SimConfig {
    int n_paths = 100000;
    double dt = 1e-3;        // years
    double t_horizon = 0.0;  // 0 resolves to the default censoring horizon
    std::uint64_t seed = 1;
};

/// Horizon at which the truncated discounted tail is below 1e-4 of scale.
double default_horizon(double r);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int n_ruined = 0;    // paths absorbed at X < 0
    int n_censored = 0;  // paths alive at the horizon
};

/// Euler-Maruyama simulation of the controlled cash process under an
/// extracted policy: liquidate below the lower curve or the mu threshold,
/// clamp-and-pay at the dividend barrier, stop at ruin or the horizon.
/// Correlated increments use the two-Gaussian construction. Paths carry
/// independent seeded substreams, so results are identical for any thread
/// count; `antithetic` negates every Gaussian draw.
McEstimate simulate_policy(const ModelParams& model, const Boundaries& boundaries, double x0,
                           double mu0, const SimConfig& cfg, int threads = 0,
                           bool antithetic = false);

}  // namespace divopt

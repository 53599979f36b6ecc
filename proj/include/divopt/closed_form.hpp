#pragma once

#include <optional>
#include <vector>

#include "divopt/grid.hpp"
#include "divopt/model.hpp"

namespace divopt {

/// Mean-reverting drift with both noises switched off; the dividend problem
/// then has an explicit solution used as an independent oracle.
struct DeterministicParams {
    double r;
    double k;
    double mu_bar;

    DeterministicParams(double r_, double k_, double mu_bar_);
};

/// Time for the deterministic profitability to reach zero from mu <= 0:
/// ln(mu_bar / (mu_bar - mu)) / (-k). Throws std::domain_error for mu > 0.
double tau0(const DeterministicParams& p, double mu);

/// Minimum cash needed to survive until profitability turns positive:
/// -mu_bar tau0(mu) - mu/k for mu < 0, zero for mu >= 0.
double x_b(const DeterministicParams& p, double mu);

/// Value of retained earnings paid out from time zero on, at (0, 0).
double deterministic_value_at_origin(const DeterministicParams& p);

/// Explicit deterministic value function.
double deterministic_value(const DeterministicParams& p, double x, double mu);

/// Liquidation threshold: the root of x_b(mu) = e^{-r tau0(mu)} V(0,0) on
/// mu < 0, found by bisection to 1e-10 absolute.
double deterministic_mu_star(const DeterministicParams& p);

struct AuxiliarySolution {
    std::vector<double> mus;
    std::vector<double> values;          // V_a >= 0, zero on the stopped region
    std::optional<double> mu_star;       // largest node of the stopped block at the bottom
    bool truncation_warning = false;     // V_a(mu_min) > 0: threshold below the grid

    /// Linear interpolation of V_a, clamped to the node range.
    double value_at(double mu) const;
};

/// Solves the 1-D real-option obstacle problem
///   min{ r V_a - kappa V_a' - sigma_tilde^2/2 V_a'' - mu, V_a } = 0
/// on a uniform node list by the same penalized policy iteration as the
/// 2-D solver (stop control at rate K). x + V_a(mu) upper-bounds the
/// dividend value.
AuxiliarySolution solve_auxiliary(const ModelParams& model, const std::vector<double>& mu_nodes,
                                  double K);

/// Convenience: solves the auxiliary problem on the grid's mu nodes extended
/// by `pad` on both sides (in integer cells, clipped to the drift domain), so
/// reflecting-boundary bias stays away from the window of interest.
AuxiliarySolution solve_auxiliary_on_grid(const ModelParams& model, const Grid& grid,
                                          double K = 0.0, double pad = 0.0);

}  // namespace divopt

#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "divopt/fields.hpp"
#include "divopt/grid.hpp"
#include "divopt/model.hpp"

namespace divopt {

/// Thrown when the cross-derivative coefficient cannot be discretized
/// monotonically on the current grid aspect ratio.
struct MonotonicityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Extension hooks for the assembled operator. Defaults reproduce the base
/// dividend problem exactly.
struct AssemblyOptions {
    /// Per-column index of the bankruptcy row (Dirichlet V = 0); nodes below
    /// are masked out. Empty means row 0 everywhere.
    std::vector<int> ruin_row;
    /// Credit-line interest: adds rho_minus * x to the cash drift where x < 0.
    double rho_minus = 0.0;
    /// Issuance rate field iota in [0, K] (injects cash at unit rate).
    const PolicyField* issuance = nullptr;
    /// Proportional issuance cost per mu column (required with issuance).
    const std::vector<double>* lambda_p = nullptr;
    /// Fixed issuance cost per mu column (fixed-cost mode).
    const std::vector<double>* lambda_f = nullptr;
    /// Fixed-cost mode: per-node jump target (node row in the same column),
    /// -1 where inactive. Nodes with a target and iota = K jump at rate K.
    const std::vector<int>* issue_target = nullptr;
    /// Issuance modes: per-column flag turning the bankruptcy row into a
    /// one-cell issuance row instead of Dirichlet V = 0.
    const std::vector<std::uint8_t>* ruin_row_issues = nullptr;
};

/// Discrete penalized HJB residual for a fixed policy: the sparse matrix A and
/// affine term q such that the policy's value solves A V = q and the residual
/// of any field W is A W - q. Interior rows discretize
///   r V - (mu - ell + iota) V_x - kappa V_mu
///     - sigma^2/2 V_xx - rho sigma sigma~ V_xmu - sigma~^2/2 V_mumu
/// with first-order terms upwinded, second-order central, and the cross term
/// on the monotone 7-point diagonal stencil; q carries ell - (1+lambda_p) iota.
struct DiscreteOperator {
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
    Eigen::VectorXd source;

    Eigen::VectorXd residual(const ValueField& v) const;
};

DiscreteOperator assemble(const ModelParams& model, const Grid& grid, const PolicyField& policy,
                          double K);
DiscreteOperator assemble(const ModelParams& model, const Grid& grid, const PolicyField& policy,
                          double K, const AssemblyOptions& opts);

/// Largest cross coefficient magnitude allowed by the monotone stencil:
/// min(sigma^2 dmu/dx, sigma_tilde^2 dx/dmu).
double cross_term_limit(const ModelParams& model, const Grid& grid, double mu);

struct RowCheck {
    int violations = 0;
    std::vector<int> offending_rows;
    bool ok() const { return violations == 0; }
};

/// Verifies the monotone-scheme invariant row by row: off-diagonals <= 0,
/// interior diagonal >= r + sum |off-diagonal| (up to round-off), boundary
/// rows weakly dominant.
RowCheck check_monotone_rows(const DiscreteOperator& op, const Grid& grid, const ModelParams& model,
                             const AssemblyOptions* opts = nullptr);

}  // namespace divopt

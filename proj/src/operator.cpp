#include "divopt/operator.hpp"

#include <cmath>
#include <sstream>

#include "stencil.hpp"

namespace divopt {

double cross_term_limit(const ModelParams& model, const Grid& grid, double mu) {
    const double st = model.sigma_tilde(mu);
    return std::min(model.sigma * model.sigma * grid.dmu() / grid.dx(),
                    st * st * grid.dx() / grid.dmu());
}

Eigen::VectorXd DiscreteOperator::residual(const ValueField& v) const {
    Eigen::Map<const Eigen::VectorXd> vv(v.data.data(), static_cast<Eigen::Index>(v.size()));
    return matrix * vv - source;
}

namespace {

void check_cross_condition(const ModelParams& model, const Grid& grid, double mu) {
    const double c = std::abs(model.rho * model.sigma * model.sigma_tilde(mu));
    const double limit = cross_term_limit(model, grid, mu);
    if (c <= limit * (1.0 + 1e-12)) return;
    std::ostringstream msg;
    msg << "cross-derivative coefficient |rho sigma sigma_tilde| = " << c << " at mu = " << mu
        << " exceeds the monotone limit " << limit << "; dx/dmu must lie in ["
        << c / (model.sigma_tilde(mu) * model.sigma_tilde(mu)) << ", "
        << model.sigma * model.sigma / c << "], current dx/dmu = " << grid.dx() / grid.dmu();
    throw MonotonicityViolation(msg.str());
}

}  // namespace

DiscreteOperator assemble(const ModelParams& model, const Grid& grid, const PolicyField& policy,
                          double K) {
    return assemble(model, grid, policy, K, AssemblyOptions{});
}

DiscreteOperator assemble(const ModelParams& model, const Grid& grid, const PolicyField& policy,
                          double K, const AssemblyOptions& opts) {
    const int nx = grid.nx();
    const int nmu = grid.nmu();
    const int n = grid.num_nodes();
    const double dx = grid.dx();

    if (policy.nx != nx || policy.nmu != nmu)
        throw std::invalid_argument("policy field does not match the grid");
    for (double ell : policy.data)
        if (!(ell >= 0.0 && ell <= K)) throw std::invalid_argument("policy value outside [0, K]");
    if (!opts.ruin_row.empty() && static_cast<int>(opts.ruin_row.size()) != nmu)
        throw std::invalid_argument("ruin_row size does not match the grid");
    const bool fixed_mode = opts.issue_target != nullptr;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 9);
    Eigen::VectorXd source = Eigen::VectorXd::Zero(n);

    for (int j = 0; j < nmu; ++j) {
        const int ruin = opts.ruin_row.empty() ? 0 : opts.ruin_row[j];
        if (ruin < 0 || ruin > nx - 3)
            throw std::invalid_argument("ruin row outside the grid at column " + std::to_string(j));
        const double mu = grid.mu(j);
        check_cross_condition(model, grid, mu);
        const auto col = detail::column_coeffs(model, mu);
        const double lam_p = opts.lambda_p ? (*opts.lambda_p)[j] : 0.0;
        const double lam_f = opts.lambda_f ? (*opts.lambda_f)[j] : 0.0;

        for (int i = 0; i < nx; ++i) {
            const int row = grid.index(i, j);
            if (i < ruin) {  // below the bankruptcy curve
                trips.emplace_back(row, row, 1.0);
                continue;
            }
            if (i == ruin) {
                if (opts.ruin_row_issues && (*opts.ruin_row_issues)[j]) {
                    if (fixed_mode) {
                        const int target = (*opts.issue_target)[row];
                        if (target <= i || target >= nx)
                            throw std::invalid_argument("issuance target outside the column");
                        trips.emplace_back(row, row, 1.0);
                        trips.emplace_back(row, grid.index(target, j), -1.0);
                        source(row) = -((1.0 + lam_p) * (grid.x(target) - grid.x(i)) + lam_f);
                    } else {
                        // One-sided V_x = 1 + lambda_p, scaled to cash units.
                        trips.emplace_back(row, row, 1.0);
                        trips.emplace_back(row, grid.index(i + 1, j), -1.0);
                        source(row) = -(1.0 + lam_p) * dx;
                    }
                } else {
                    trips.emplace_back(row, row, 1.0);  // bankruptcy: V = 0
                }
                continue;
            }
            if (i == nx - 1) {  // dividend reflection: discrete V_x = 1
                trips.emplace_back(row, row, 1.0 / dx);
                trips.emplace_back(row, grid.index(i - 1, j), -1.0 / dx);
                source(row) = 1.0;
                continue;
            }
            if (j == 0 || j == nmu - 1) {  // reflecting in mu: V_mu = 0
                const int jn = (j == 0) ? 1 : nmu - 2;
                trips.emplace_back(row, row, 1.0);
                trips.emplace_back(row, grid.index(i, jn), -1.0);
                continue;
            }

            const double ell = policy(i, j);
            const double iota = opts.issuance ? (*opts.issuance)(i, j) : 0.0;
            const double x = grid.x(i);
            double bx = mu - ell;
            if (x < 0.0) bx += opts.rho_minus * x;
            if (!fixed_mode) bx += iota;

            const auto stencil = detail::interior_row(model, grid, col, bx);
            double diag = stencil.diag;
            double q = ell;
            if (!fixed_mode) {
                q -= (1.0 + lam_p) * iota;
            } else if (iota > 0.0) {
                const int target = (*opts.issue_target)[row];
                if (target > i && target < nx) {
                    // Investor arrival at rate iota moving cash to the target level.
                    diag += iota;
                    trips.emplace_back(row, grid.index(target, j), -iota);
                    q -= iota * ((1.0 + lam_p) * (grid.x(target) - x) + lam_f);
                }
            }

            trips.emplace_back(row, row, diag);
            trips.emplace_back(row, grid.index(i + 1, j), stencil.nb[0]);
            trips.emplace_back(row, grid.index(i - 1, j), stencil.nb[1]);
            trips.emplace_back(row, grid.index(i, j + 1), stencil.nb[2]);
            trips.emplace_back(row, grid.index(i, j - 1), stencil.nb[3]);
            if (stencil.has_cross) {
                if (stencil.cross_sign > 0) {
                    trips.emplace_back(row, grid.index(i + 1, j + 1), stencil.nb[4]);
                    trips.emplace_back(row, grid.index(i - 1, j - 1), stencil.nb[5]);
                } else {
                    trips.emplace_back(row, grid.index(i + 1, j - 1), stencil.nb[6]);
                    trips.emplace_back(row, grid.index(i - 1, j + 1), stencil.nb[7]);
                }
            }
            source(row) = q;
        }
    }

    DiscreteOperator op;
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(trips.begin(), trips.end());
    op.source = std::move(source);
    return op;
}

RowCheck check_monotone_rows(const DiscreteOperator& op, const Grid& grid, const ModelParams& model,
                             const AssemblyOptions* opts) {
    const int nx = grid.nx();
    RowCheck result;
    for (int row = 0; row < op.matrix.rows(); ++row) {
        const int i = row % nx;
        const int j = row / nx;
        const int ruin = (opts && !opts->ruin_row.empty()) ? opts->ruin_row[j] : 0;
        const bool interior = i > ruin && i < nx - 1 && j > 0 && j < grid.nmu() - 1;

        double diag = 0.0;
        double off_sum = 0.0;
        bool off_sign_ok = true;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(op.matrix, row); it;
             ++it) {
            if (it.col() == row) {
                diag += it.value();
            } else {
                if (it.value() > 1e-12 * (1.0 + std::abs(it.value()))) off_sign_ok = false;
                off_sum += std::abs(it.value());
            }
        }
        const double margin = interior ? model.r : 0.0;
        const double tol = 1e-9 * (std::abs(diag) + off_sum + 1.0);
        if (!off_sign_ok || !(diag > 0.0) || diag + tol < margin + off_sum) {
            ++result.violations;
            if (result.offending_rows.size() < 32) result.offending_rows.push_back(row);
        }
    }
    return result;
}

double interpolate(const Field& field, const Grid& grid, double x, double mu) {
    const int nx = grid.nx();
    const int nmu = grid.nmu();
    double fx = (x - grid.spec.x_min) / grid.dx();
    double fm = (mu - grid.spec.mu_min) / grid.dmu();
    fx = std::clamp(fx, 0.0, static_cast<double>(nx - 1));
    fm = std::clamp(fm, 0.0, static_cast<double>(nmu - 1));
    const int i = std::min(static_cast<int>(fx), nx - 2);
    const int j = std::min(static_cast<int>(fm), nmu - 2);
    const double tx = fx - i;
    const double tm = fm - j;
    return (1 - tx) * (1 - tm) * field(i, j) + tx * (1 - tm) * field(i + 1, j) +
           (1 - tx) * tm * field(i, j + 1) + tx * tm * field(i + 1, j + 1);
}

}  // namespace divopt

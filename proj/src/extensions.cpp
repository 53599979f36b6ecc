#include "divopt/extensions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "solver_core.hpp"

namespace divopt {

std::function<double(double)> logistic_cost(double hi, double lo, double mid, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("logistic cost: scale must be > 0");
    return [=](double mu) { return hi - (hi - lo) / (1.0 + std::exp(-(mu - mid) / scale)); };
}

namespace {

std::vector<double> sample_cost(const std::function<double(double)>& fn, const Grid& grid,
                                const char* name) {
    std::vector<double> out(grid.nmu(), 0.0);
    if (!fn) return out;
    for (int j = 0; j < grid.nmu(); ++j) {
        out[j] = fn(grid.mu(j));
        if (!(out[j] >= 0.0) || !std::isfinite(out[j]))
            throw std::invalid_argument(std::string(name) + ": must be finite and >= 0 at mu=" +
                                        std::to_string(grid.mu(j)));
    }
    return out;
}

SolverControls merge_controls(double tau, int max_iter, const SolverControls* controls) {
    SolverControls out;
    if (controls) out = *controls;
    out.tau = tau;
    out.max_iter = max_iter;
    return out;
}

ExtensionSolution finish(const detail::PenalizedProblem& problem, detail::CoreResult&& core,
                         bool with_issuance) {
    const Grid& grid = *problem.grid;
    ExtensionSolution out;
    out.value = std::move(core.value);
    out.dividends = std::move(core.policy.ell);
    out.report = std::move(core.report);

    ExtractOptions opts;
    if (!problem.ruin_row.empty()) opts.floor_row = problem.ruin_row;
    out.boundaries = extract_boundaries(out.dividends, grid, problem.K, opts);

    if (with_issuance) {
        out.issuance = std::move(core.policy.iota);
        out.boundary_issues.assign(core.policy.ruin_issue.begin(), core.policy.ruin_issue.end());
        for (int j = 0; j < grid.nmu(); ++j) {
            if (out.boundary_issues[j]) {
                out.boundaries.issuance_threshold = grid.mu(j);
                break;
            }
        }
        if (problem.issuance == detail::IssuanceMode::Fixed) {
            out.boundaries.issuance_target.assign(grid.nmu(), std::nullopt);
            for (int j = 0; j < grid.nmu(); ++j) {
                const int ruin = problem.ruin(j);
                int active = -1;
                if (out.boundary_issues[j]) {
                    active = ruin;
                } else {
                    for (int i = ruin + 1; i < grid.nx() - 1; ++i) {
                        if (out.issuance(i, j) > 0.0) {
                            active = i;
                            break;
                        }
                    }
                }
                if (active >= 0) {
                    const int target = core.policy.issue_target[grid.index(active, j)];
                    if (target > active) out.boundaries.issuance_target[j] = grid.x(target);
                }
            }
        }
    }
    return out;
}

}  // namespace

ExtensionSolution solve_proportional_issuance(const ModelParams& model, const Grid& grid,
                                              const IssuanceSpec& spec, double K, double tau,
                                              int max_iter, const SolverControls* controls) {
    if (!spec.lambda_p) throw std::invalid_argument("issuance.lambda_p: required");
    detail::PenalizedProblem problem;
    problem.model = &model;
    problem.grid = &grid;
    problem.K = K;
    problem.issuance = detail::IssuanceMode::Proportional;
    problem.lambda_p = sample_cost(spec.lambda_p, grid, "issuance.lambda_p");
    problem.lambda_f = sample_cost(spec.lambda_f, grid, "issuance.lambda_f");
    for (double lf : problem.lambda_f)
        if (lf != 0.0)
            throw std::invalid_argument(
                "issuance.lambda_f: must be identically zero for proportional issuance");

    auto core = detail::solve_penalized(problem, detail::initial_state(problem, nullptr),
                                        merge_controls(tau, max_iter, controls));
    return finish(problem, std::move(core), true);
}

ExtensionSolution solve_fixed_issuance(const ModelParams& model, const Grid& grid,
                                       const IssuanceSpec& spec, double K, double tau, int max_iter,
                                       const SolverControls* controls) {
    if (!spec.lambda_p) throw std::invalid_argument("issuance.lambda_p: required");
    if (!spec.lambda_f) throw std::invalid_argument("issuance.lambda_f: required");
    detail::PenalizedProblem problem;
    problem.model = &model;
    problem.grid = &grid;
    problem.K = K;
    problem.issuance = detail::IssuanceMode::Fixed;
    problem.lambda_p = sample_cost(spec.lambda_p, grid, "issuance.lambda_p");
    problem.lambda_f = sample_cost(spec.lambda_f, grid, "issuance.lambda_f");

    auto core = detail::solve_penalized(problem, detail::initial_state(problem, nullptr),
                                        merge_controls(tau, max_iter, controls));
    return finish(problem, std::move(core), true);
}

ExtensionSolution solve_credit_line(const ModelParams& model, const Grid& grid,
                                    const CreditLineSpec& spec, double K, double tau, int max_iter,
                                    const SolverControls* controls) {
    if (!spec.x_lower) throw std::invalid_argument("credit.x_lower: required");
    if (!(spec.rho_minus >= 0.0)) throw std::invalid_argument("credit.rho_minus: must be >= 0");

    detail::PenalizedProblem problem;
    problem.model = &model;
    problem.grid = &grid;
    problem.K = K;
    problem.rho_minus = spec.rho_minus;
    problem.ruin_row.resize(grid.nmu());
    for (int j = 0; j < grid.nmu(); ++j) {
        const double xl = spec.x_lower(grid.mu(j));
        if (!(xl <= 0.0))
            throw std::invalid_argument("credit.x_lower: must be <= 0 at mu=" +
                                        std::to_string(grid.mu(j)));
        if (xl < grid.spec.x_min - 0.5 * grid.dx())
            throw std::invalid_argument("credit.x_lower: exits the grid at mu=" +
                                        std::to_string(grid.mu(j)));
        const int row = grid.nearest_row(xl);
        if (row > grid.nx() - 3)
            throw std::invalid_argument("credit.x_lower: too close to x_max at mu=" +
                                        std::to_string(grid.mu(j)));
        problem.ruin_row[j] = row;
    }

    auto core = detail::solve_penalized(problem, detail::initial_state(problem, nullptr),
                                        merge_controls(tau, max_iter, controls));
    return finish(problem, std::move(core), false);
}

}  // namespace divopt

#include "divopt/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "divopt/operator.hpp"
#include "solver_core.hpp"
#include "stencil.hpp"

namespace divopt {

std::string to_string(HaltReason reason) {
    switch (reason) {
        case HaltReason::Tolerance: return "TOLERANCE";
        case HaltReason::PolicyFixed: return "POLICY_FIXED";
        case HaltReason::MaxIter: return "MAX_ITER";
    }
    return "UNKNOWN";
}

double default_penalization(const Grid& grid) { return 100.0 / grid.dx(); }

}  // namespace divopt

namespace divopt::detail {

namespace {

/// Linear solves inside policy iteration. Small systems factorize directly;
/// large ones run BiCGSTAB/ILUT warm-started from the previous iterate, which
/// dominates refactorization once the policy settles. Either route verifies a
/// 1e-10 relative residual and falls back to the other on failure.
class LinearSolver {
public:
    LinearSolver(SolverControls::Linear mode, Eigen::Index n, bool pattern_stable)
        : mode_(mode), pattern_stable_(pattern_stable) {
        direct_first_ = mode == SolverControls::Linear::Direct ||
                        (mode == SolverControls::Linear::Auto && n < 20000);
    }

    Eigen::VectorXd solve(const DiscreteOperator& op, const Eigen::VectorXd* guess) {
        if (direct_first_) {
            Eigen::VectorXd x;
            if (direct(op, x)) return x;
            if (mode_ == SolverControls::Linear::Direct)
                throw std::runtime_error("sparse LU factorization failed");
            direct_first_ = false;
        }
        Eigen::VectorXd x;
        if (iterative(op, guess, x)) return x;
        if (mode_ != SolverControls::Linear::Iterative && direct(op, x)) return x;
        throw std::runtime_error("linear solver stalled on both routes");
    }

    const std::string& name() const { return name_; }

private:
    bool acceptable(const DiscreteOperator& op, const Eigen::VectorXd& x) const {
        const double denom = std::max(op.source.norm(), 1e-30);
        return (op.matrix * x - op.source).norm() / denom <= 1e-10;
    }

    bool direct(const DiscreteOperator& op, Eigen::VectorXd& x) {
        col_major_ = op.matrix;
        if (!analyzed_ || !pattern_stable_) {
            lu_.analyzePattern(col_major_);
            analyzed_ = true;
        }
        lu_.factorize(col_major_);
        if (lu_.info() != Eigen::Success) return false;
        x = lu_.solve(op.source);
        if (lu_.info() != Eigen::Success || !acceptable(op, x)) return false;
        name_ = "sparse_lu";
        return true;
    }

    bool iterative(const DiscreteOperator& op, const Eigen::VectorXd* guess, Eigen::VectorXd& x) {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>,
                        Eigen::IncompleteLUT<double>>
            solver;
        solver.setTolerance(1e-12);
        solver.setMaxIterations(800);
        solver.preconditioner().setDroptol(1e-5);
        solver.preconditioner().setFillfactor(12);
        solver.compute(op.matrix);
        x = guess ? solver.solveWithGuess(op.source, *guess).eval() : solver.solve(op.source).eval();
        if (!acceptable(op, x)) return false;
        name_ = "bicgstab_ilut";
        return true;
    }

    SolverControls::Linear mode_;
    bool direct_first_;
    bool pattern_stable_;
    bool analyzed_ = false;
    std::string name_;
    Eigen::SparseMatrix<double> col_major_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

AssemblyOptions assembly_options(const PenalizedProblem& problem, const PolicyState& state) {
    AssemblyOptions opts;
    opts.ruin_row = problem.ruin_row;
    opts.rho_minus = problem.rho_minus;
    if (problem.issuance != IssuanceMode::None) {
        opts.issuance = &state.iota;
        opts.lambda_p = &problem.lambda_p;
        opts.lambda_f = &problem.lambda_f;
        opts.ruin_row_issues = &state.ruin_issue;
        if (problem.issuance == IssuanceMode::Fixed) opts.issue_target = &state.issue_target;
    }
    return opts;
}

/// Reporting conventions for rows the improvement step does not own: the
/// bankruptcy row mirrors the node above it (so extraction sees barrier
/// columns reach the bottom), masked and top rows pay, mu-edge columns mirror
/// their interior neighbor.
void apply_conventions(const PenalizedProblem& problem, PolicyState& state) {
    const Grid& grid = *problem.grid;
    const int nx = grid.nx();
    const int nmu = grid.nmu();
    const bool with_iota = problem.issuance != IssuanceMode::None;
    const bool fixed = problem.issuance == IssuanceMode::Fixed;

    auto finalize_column = [&](int j) {
        const int ruin = problem.ruin(j);
        state.ell(nx - 1, j) = problem.K;
        if (with_iota) state.iota(nx - 1, j) = 0.0;
        for (int i = 0; i < ruin; ++i) {
            state.ell(i, j) = problem.K;
            if (with_iota) state.iota(i, j) = 0.0;
            if (fixed) state.issue_target[grid.index(i, j)] = -1;
        }
        state.ell(ruin, j) = state.ell(ruin + 1, j);
        if (with_iota) state.iota(ruin, j) = 0.0;
    };

    for (int j = 1; j < nmu - 1; ++j) finalize_column(j);
    for (auto [dst, src] : {std::pair{0, 1}, std::pair{nmu - 1, nmu - 2}}) {
        for (int i = 0; i < nx; ++i) {
            state.ell(i, dst) = state.ell(i, src);
            if (with_iota) state.iota(i, dst) = state.iota(i, src);
            if (fixed && i != problem.ruin(dst))
                state.issue_target[grid.index(i, dst)] = state.issue_target[grid.index(i, src)];
        }
        finalize_column(dst);
    }
}

/// Node-wise greedy step: picks the residual-minimizing control among the
/// bang-bang candidates, keeping the incumbent on exact ties.
PolicyState improve(const PenalizedProblem& problem, const ValueField& value,
                    const PolicyState& cur) {
    const Grid& grid = *problem.grid;
    const ModelParams& model = *problem.model;
    const int nx = grid.nx();
    const int nmu = grid.nmu();
    const double K = problem.K;
    const bool prop = problem.issuance == IssuanceMode::Proportional;
    const bool fixed = problem.issuance == IssuanceMode::Fixed;

    PolicyState next = cur;

    std::vector<double> w(nx);
    std::vector<int> suffix_best(nx + 1);

    auto column_suffix = [&](int j, double lam_p) {
        const int ruin = problem.ruin(j);
        suffix_best[nx] = -1;
        int best = -1;
        for (int i = nx - 1; i > ruin; --i) {
            w[i] = value(i, j) - (1.0 + lam_p) * grid.x(i);
            if (best == -1 || w[i] >= w[best]) best = i;  // smallest index on ties
            suffix_best[i] = best;
        }
    };

    for (int j = 1; j < nmu - 1; ++j) {
        const double mu = grid.mu(j);
        const auto col = detail::column_coeffs(model, mu);
        const int ruin = problem.ruin(j);
        const double lam_p = problem.lambda_p.empty() ? 0.0 : problem.lambda_p[j];
        const double lam_f = problem.lambda_f.empty() ? 0.0 : problem.lambda_f[j];
        if (fixed) column_suffix(j, lam_p);

        for (int i = ruin + 1; i <= nx - 2; ++i) {
            const double x = grid.x(i);
            const bool div_ok = x >= 0.0 || problem.dividends_below_zero;
            auto neighbor = [&](int di, int dj) { return value(i + di, j + dj); };

            auto residual = [&](double ell, double iota, int target) {
                double bx = mu - ell;
                if (x < 0.0) bx += problem.rho_minus * x;
                if (prop) bx += iota;
                const auto row = detail::interior_row(model, grid, col, bx);
                double res = row.apply(value(i, j), neighbor) - ell;
                if (prop) res += (1.0 + lam_p) * iota;
                if (fixed && iota > 0.0 && target > i)
                    res += iota * (value(i, j) - (value(target, j) -
                                                  (1.0 + lam_p) * (grid.x(target) - x) - lam_f));
                return res;
            };

            double best_ell = cur.ell(i, j);
            double best_iota = (prop || fixed) ? cur.iota(i, j) : 0.0;
            int best_target = fixed ? cur.issue_target[grid.index(i, j)] : -1;
            double best_res = residual(best_ell, best_iota, best_target);
            const int target_new = fixed ? suffix_best[i + 1] : -1;

            for (double ell : {0.0, K}) {
                if (ell > 0.0 && !div_ok) continue;
                const int iota_candidates = (prop || fixed) ? 2 : 1;
                for (int q = 0; q < iota_candidates; ++q) {
                    const double iota = q ? K : 0.0;
                    int target = -1;
                    if (fixed && iota > 0.0) {
                        if (target_new <= i) continue;  // nothing to jump to
                        target = target_new;
                    }
                    if (ell == best_ell && iota == best_iota && target == best_target) continue;
                    const double res = residual(ell, iota, target);
                    if (res < best_res) {
                        best_res = res;
                        best_ell = ell;
                        best_iota = iota;
                        best_target = target;
                    }
                }
            }
            next.ell(i, j) = best_ell;
            if (prop || fixed) next.iota(i, j) = best_iota;
            if (fixed) next.issue_target[grid.index(i, j)] = best_iota > 0.0 ? best_target : -1;
        }
    }

    // Bankruptcy-row control in issuance modes: absorb (V = 0) or issue.
    if (prop || fixed) {
        for (int j = 0; j < nmu; ++j) {
            const int ruin = problem.ruin(j);
            const double lam_p = problem.lambda_p[j];
            const double lam_f = problem.lambda_f[j];
            if (fixed) column_suffix(j, lam_p);
            const int target_new = fixed ? suffix_best[ruin + 1] : -1;

            auto issue_residual = [&](int target) {
                if (!fixed)
                    return value(ruin, j) - value(ruin + 1, j) + (1.0 + lam_p) * grid.dx();
                return value(ruin, j) -
                       (value(target, j) - (1.0 + lam_p) * (grid.x(target) - grid.x(ruin)) - lam_f);
            };

            const bool inc_issue = cur.ruin_issue[j] != 0;
            const int inc_target = fixed ? cur.issue_target[grid.index(ruin, j)] : -1;

            bool best_issue = inc_issue;
            int best_target = inc_target;
            double best_res = inc_issue ? issue_residual(inc_target) : value(ruin, j);

            if (inc_issue) {  // candidate: absorb
                if (value(ruin, j) < best_res) {
                    best_issue = false;
                    best_target = -1;
                    best_res = value(ruin, j);
                }
            }
            if (!fixed || target_new > ruin) {  // candidate: issue (fresh target)
                if (!(inc_issue && target_new == inc_target)) {
                    const double res = issue_residual(target_new);
                    if (res < best_res) {
                        best_issue = true;
                        best_target = target_new;
                        best_res = res;
                    }
                }
            }
            next.ruin_issue[j] = best_issue ? 1 : 0;
            if (fixed) next.issue_target[grid.index(ruin, j)] = best_issue ? best_target : -1;
        }
    }

    apply_conventions(problem, next);
    return next;
}

int count_changes(const PolicyState& a, const PolicyState& b) {
    int changes = 0;
    for (std::size_t n = 0; n < a.ell.data.size(); ++n)
        if (a.ell.data[n] != b.ell.data[n]) ++changes;
    for (std::size_t n = 0; n < a.iota.data.size(); ++n)
        if (a.iota.data[n] != b.iota.data[n]) ++changes;
    for (std::size_t n = 0; n < a.issue_target.size(); ++n)
        if (a.issue_target[n] != b.issue_target[n]) ++changes;
    for (std::size_t n = 0; n < a.ruin_issue.size(); ++n)
        if (a.ruin_issue[n] != b.ruin_issue[n]) ++changes;
    return changes;
}

}  // namespace

PolicyState initial_state(const PenalizedProblem& problem, const PolicyField* ell0) {
    const Grid& grid = *problem.grid;
    PolicyState state;
    state.ell = ell0 ? *ell0 : PolicyField(grid, 0.0);
    if (state.ell.nx != grid.nx() || state.ell.nmu != grid.nmu())
        throw std::invalid_argument("initial policy does not match the grid");
    if (problem.issuance != IssuanceMode::None) {
        state.iota = PolicyField(grid, 0.0);
        state.ruin_issue.assign(grid.nmu(), 0);
        if (problem.issuance == IssuanceMode::Fixed)
            state.issue_target.assign(grid.num_nodes(), -1);
    }
    return state;
}

CoreResult solve_penalized(const PenalizedProblem& problem, PolicyState state,
                           const SolverControls& controls) {
    if (!(problem.K > 0.0)) throw std::invalid_argument("solver.K: must be > 0");
    if (!(controls.tau >= 0.0)) throw std::invalid_argument("solver.tau: must be >= 0");
    if (controls.max_iter < 1) throw std::invalid_argument("solver.max_iter: must be >= 1");
    if (problem.issuance != IssuanceMode::None &&
        (static_cast<int>(problem.lambda_p.size()) != problem.grid->nmu() ||
         static_cast<int>(problem.lambda_f.size()) != problem.grid->nmu()))
        throw std::invalid_argument("issuance cost curves do not match the grid");

    const auto t0 = std::chrono::steady_clock::now();
    const Grid& grid = *problem.grid;
    const int n = grid.num_nodes();

    apply_conventions(problem, state);
    LinearSolver lin(controls.linear, n, problem.issuance != IssuanceMode::Fixed);

    SolveReport report;
    DiscreteOperator op = assemble(*problem.model, grid, state.ell, problem.K,
                                   assembly_options(problem, state));
    Eigen::VectorXd v = lin.solve(op, nullptr);
    report.iterations = 1;

    ValueField value(grid);
    auto publish = [&] { std::copy(v.data(), v.data() + n, value.data.begin()); };
    publish();

    while (true) {
        PolicyState improved = improve(problem, value, state);
        if (improved == state) {
            report.halt_reason = HaltReason::PolicyFixed;
            break;
        }
        if (report.iterations >= controls.max_iter) {
            report.halt_reason = HaltReason::MaxIter;
            break;
        }
        const int changes = controls.diag ? count_changes(improved, state) : 0;
        state = std::move(improved);

        op = assemble(*problem.model, grid, state.ell, problem.K,
                      assembly_options(problem, state));
        Eigen::VectorXd v_new = lin.solve(op, &v);
        ++report.iterations;

        const Eigen::VectorXd dv = v_new - v;
        const double sup = dv.cwiseAbs().maxCoeff();
        report.residual_history.push_back(sup);
        report.min_increment_history.push_back(dv.minCoeff());
        v = std::move(v_new);
        publish();

        if (controls.diag)
            (*controls.diag) << "pi iter=" << report.iterations << " sup_dv=" << sup
                             << " policy_changes=" << changes << '\n';

        if (sup <= controls.tau) {
            report.halt_reason = HaltReason::Tolerance;
            break;
        }
    }

    report.linear_solver = lin.name();
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return CoreResult{std::move(value), std::move(state), std::move(report)};
}

}  // namespace divopt::detail

namespace divopt {

Solution policy_iteration(const ModelParams& model, const Grid& grid, double K, double tau,
                          int max_iter, const PolicyField& initial_policy) {
    SolverControls controls;
    controls.tau = tau;
    controls.max_iter = max_iter;
    return policy_iteration(model, grid, K, controls, initial_policy);
}

Solution policy_iteration(const ModelParams& model, const Grid& grid, double K,
                          const SolverControls& controls, const PolicyField& initial_policy) {
    detail::PenalizedProblem problem;
    problem.model = &model;
    problem.grid = &grid;
    problem.K = K;
    auto result = detail::solve_penalized(problem, detail::initial_state(problem, &initial_policy),
                                          controls);
    return Solution{std::move(result.value), std::move(result.policy.ell),
                    std::move(result.report)};
}

ContinuationResult k_continuation(const ModelParams& model, const Grid& grid,
                                  const std::vector<double>& k_schedule, double tau, int max_iter,
                                  const SolverControls* controls) {
    if (k_schedule.empty()) throw std::invalid_argument("solver.k_schedule: must be non-empty");
    for (std::size_t s = 0; s < k_schedule.size(); ++s) {
        if (!(k_schedule[s] > 0.0))
            throw std::invalid_argument("solver.k_schedule: values must be positive");
        if (s > 0 && !(k_schedule[s] > k_schedule[s - 1]))
            throw std::invalid_argument("solver.k_schedule: must be strictly increasing");
    }

    SolverControls base_controls;
    if (controls) base_controls = *controls;
    base_controls.tau = tau;
    base_controls.max_iter = max_iter;

    ContinuationResult out;
    PolicyField policy(grid, 0.0);
    for (double K : k_schedule) {
        for (double& ell : policy.data) ell = ell > 0.0 ? K : 0.0;  // warm start at the new cap
        Solution sol = policy_iteration(model, grid, K, base_controls, policy);
        policy = sol.policy;
        out.ks.push_back(K);
        out.values.push_back(std::move(sol.value));
        out.reports.push_back(std::move(sol.report));
    }
    out.final_policy = std::move(policy);
    return out;
}

}  // namespace divopt

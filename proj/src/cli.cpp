#include "divopt/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "divopt/artifacts.hpp"
#include "divopt/closed_form.hpp"
#include "divopt/invariants.hpp"
#include "divopt/mc.hpp"
#include "divopt/operator.hpp"

namespace divopt {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ostream& out_stream(const CliOptions& opts) { return opts.out ? *opts.out : std::cout; }
std::ostream& err_stream(const CliOptions& opts) { return opts.err ? *opts.err : std::cerr; }

SolverControls controls_from(const RunConfig& cfg, const CliOptions& opts) {
    SolverControls ctl;
    ctl.tau = cfg.tau;
    ctl.max_iter = cfg.max_iter;
    ctl.linear = cfg.linear;
    ctl.diag = opts.diag;
    return ctl;
}

void write_echo(const RunConfig& cfg, const fs::path& dir) {
    json echo = cfg.resolved;
    write_text_atomic(dir / "config_echo.json", echo.dump(2) + "\n");
}

json boundaries_meta(const Boundaries& b) {
    json meta;
    meta["mu_star"] = b.mu_star ? json(*b.mu_star) : json();
    meta["issuance_threshold"] =
        b.issuance_threshold ? json(*b.issuance_threshold) : json();
    meta["truncation_warning"] = b.truncation_warning;
    meta["non_contiguous_columns"] = b.non_contiguous_columns;
    meta["anomaly_columns"] = b.anomaly_columns;
    return meta;
}

struct BaseRun {
    Grid grid;
    Solution sol;
    Boundaries boundaries;
};

BaseRun solve_base(const RunConfig& cfg, const CliOptions& opts) {
    BaseRun run{build(cfg.grid, cfg.model), {}, {}};
    const SolverControls ctl = controls_from(cfg, opts);
    if (!cfg.k_schedule.empty()) {
        ContinuationResult cont =
            k_continuation(cfg.model, run.grid, cfg.k_schedule, cfg.tau, cfg.max_iter, &ctl);
        run.sol.value = std::move(cont.values.back());
        run.sol.policy = std::move(cont.final_policy);
        run.sol.report = std::move(cont.reports.back());
    } else {
        run.sol = policy_iteration(cfg.model, run.grid, cfg.K, ctl, PolicyField(run.grid, 0.0));
    }
    const double K = cfg.k_schedule.empty() ? cfg.K : cfg.k_schedule.back();
    run.boundaries = extract_boundaries(run.sol.policy, run.grid, K);
    return run;
}

int write_solution_artifacts(const RunConfig& cfg, const fs::path& dir, const Grid& grid,
                             const ValueField& value, const PolicyField& policy,
                             const Boundaries& boundaries, const SolveReport& report,
                             bool with_issuance_target) {
    write_text_atomic(dir / "boundaries.csv", boundaries_csv(boundaries, with_issuance_target));
    write_text_atomic(dir / "value.csv", value_csv(grid, value, policy));
    json rep = report_json(report);
    rep["mode"] = to_string(cfg.mode);
    rep["K"] = cfg.K;
    rep["boundaries"] = boundaries_meta(boundaries);
    write_text_atomic(dir / "report.json", rep.dump(2) + "\n");
    write_echo(cfg, dir);
    return report.converged() ? 0 : 2;
}

int run_deterministic(const RunConfig& cfg, const CliOptions& opts, const fs::path& dir) {
    const auto* ou = std::get_if<OrnsteinUhlenbeck>(&cfg.model.drift.variant);
    if (!ou) throw ConfigError("drift.kind: deterministic mode requires the ou drift");
    const DeterministicParams p(cfg.model.r, ou->k, ou->mu_bar);

    const double v00 = deterministic_value_at_origin(p);
    std::string csv = "mu,xb,futureIncome\n";
    const double dmu = (cfg.grid.mu_max - cfg.grid.mu_min) / (cfg.grid.nmu - 1);
    for (int j = 0; j < cfg.grid.nmu; ++j) {
        const double mu = cfg.grid.mu_min + j * dmu;
        if (mu > 0.0) break;
        csv += format_double(mu);
        csv += ',';
        csv += format_double(x_b(p, mu));
        csv += ',';
        csv += format_double(std::exp(-p.r * tau0(p, mu)) * v00);
        csv += '\n';
    }
    write_text_atomic(dir / "deterministic.csv", csv);

    const double mu_star = deterministic_mu_star(p);
    json rep = {{"mode", "deterministic"},
                {"mu_star", mu_star},
                {"value_at_origin", v00}};
    write_text_atomic(dir / "report.json", rep.dump(2) + "\n");
    write_echo(cfg, dir);
    out_stream(opts) << "deterministic mu_star = " << mu_star << '\n';
    return 0;
}

int run_auxiliary(const RunConfig& cfg, const CliOptions& opts, const fs::path& dir) {
    const Grid grid = build(cfg.grid, cfg.model);
    const AuxiliarySolution va = solve_auxiliary_on_grid(cfg.model, grid);

    std::string csv = "mu,Va\n";
    for (std::size_t j = 0; j < va.mus.size(); ++j) {
        csv += format_double(va.mus[j]);
        csv += ',';
        csv += format_double(va.values[j]);
        csv += '\n';
    }
    write_text_atomic(dir / "auxiliary.csv", csv);

    json rep = {{"mode", "auxiliary"},
                {"mu_star", va.mu_star ? json(*va.mu_star) : json()},
                {"truncation_warning", va.truncation_warning}};
    write_text_atomic(dir / "report.json", rep.dump(2) + "\n");
    write_echo(cfg, dir);
    if (va.mu_star)
        out_stream(opts) << "auxiliary mu_star = " << *va.mu_star << '\n';
    else
        out_stream(opts) << "auxiliary: no liquidation threshold inside the grid\n";
    if (va.truncation_warning)
        err_stream(opts) << "warning: V_a(mu_min) > 0; widen the mu range\n";
    return 0;
}

int run_mc(const RunConfig& cfg, const CliOptions& opts, const fs::path& dir) {
    BaseRun base = solve_base(cfg, opts);
    const SimConfig& sim = cfg.mc.sim;

    std::string csv = "x,mu,gridV,mcMean,mcStdErr,nRuined,nCensored\n";
    auto& os = out_stream(opts);
    for (auto [x, mu] : cfg.mc.points) {
        const McEstimate est =
            simulate_policy(cfg.model, base.boundaries, x, mu, sim, opts.threads);
        const double grid_v = interpolate(base.sol.value, base.grid, x, mu);
        os << "mc (x=" << x << ", mu=" << mu << "): estimate " << est.mean << " +- "
           << est.std_error << ", grid " << grid_v << ", diff " << est.mean - grid_v << '\n';
        csv += format_double(x);
        csv += ',';
        csv += format_double(mu);
        csv += ',';
        csv += format_double(grid_v);
        csv += ',';
        csv += format_double(est.mean);
        csv += ',';
        csv += format_double(est.std_error);
        csv += ',';
        csv += std::to_string(est.n_ruined);
        csv += ',';
        csv += std::to_string(est.n_censored);
        csv += '\n';
    }
    write_text_atomic(dir / "mc.csv", csv);

    json rep = report_json(base.sol.report);
    rep["mode"] = "mc";
    rep["seed"] = sim.seed;
    write_text_atomic(dir / "report.json", rep.dump(2) + "\n");
    write_echo(cfg, dir);
    return base.sol.report.converged() ? 0 : 2;
}

int run_validate(const RunConfig& cfg, const CliOptions& opts, const fs::path& dir) {
    const ValidationReport report =
        validate_assumptions(cfg.model, cfg.validate.interval, cfg.validate.n_samples);
    auto& os = out_stream(opts);
    json checks = json::array();
    for (const auto& check : report.checks) {
        const char* status = check.status == AssumptionCheck::Status::Pass      ? "pass"
                             : check.status == AssumptionCheck::Status::Fail    ? "FAIL"
                                                                                : "not checked";
        os << "check " << check.name << ": " << status;
        if (!check.note.empty()) os << " (" << check.note << ")";
        os << '\n';
        checks.push_back({{"name", check.name},
                          {"status", status},
                          {"offending_mus", check.offending_mus},
                          {"note", check.note}});
    }
    write_text_atomic(dir / "validate.json",
                      json{{"mode", "validate"}, {"checks", checks}}.dump(2) + "\n");
    write_echo(cfg, dir);
    return report.all_passed() ? 0 : 1;
}

int run_extension(const RunConfig& cfg, const CliOptions& opts, const fs::path& dir) {
    const Grid grid = build(cfg.grid, cfg.model);
    const SolverControls ctl = controls_from(cfg, opts);
    ExtensionSolution sol;
    bool with_target = false;
    if (cfg.mode == RunMode::ProportionalIssuance) {
        sol = solve_proportional_issuance(cfg.model, grid, *cfg.issuance, cfg.K, cfg.tau,
                                          cfg.max_iter, &ctl);
    } else if (cfg.mode == RunMode::FixedIssuance) {
        sol = solve_fixed_issuance(cfg.model, grid, *cfg.issuance, cfg.K, cfg.tau, cfg.max_iter,
                                   &ctl);
        with_target = true;
    } else {
        sol = solve_credit_line(cfg.model, grid, *cfg.credit, cfg.K, cfg.tau, cfg.max_iter, &ctl);
    }
    if (sol.boundaries.issuance_threshold)
        out_stream(opts) << "issuance threshold = " << *sol.boundaries.issuance_threshold << '\n';
    return write_solution_artifacts(cfg, dir, grid, sol.value, sol.dividends, sol.boundaries,
                                    sol.report, with_target);
}

}  // namespace

int run(const RunConfig& cfg_in, const CliOptions& opts) {
    // A seed override becomes part of the effective config, so the echo
    // still reproduces the run.
    RunConfig cfg = cfg_in;
    if (opts.seed) {
        cfg.mc.sim.seed = *opts.seed;
        if (cfg.resolved.contains("mc")) cfg.resolved["mc"]["seed"] = *opts.seed;
    }
    const fs::path dir = opts.out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(opts.out_dir);
    try {
        fs::create_directories(dir);
        switch (cfg.mode) {
            case RunMode::Base: {
                BaseRun base = solve_base(cfg, opts);
                return write_solution_artifacts(cfg, dir, base.grid, base.sol.value,
                                                base.sol.policy, base.boundaries, base.sol.report,
                                                false);
            }
            case RunMode::ProportionalIssuance:
            case RunMode::FixedIssuance:
            case RunMode::CreditLine:
                return run_extension(cfg, opts, dir);
            case RunMode::Deterministic:
                return run_deterministic(cfg, opts, dir);
            case RunMode::Auxiliary:
                return run_auxiliary(cfg, opts, dir);
            case RunMode::Mc:
                return run_mc(cfg, opts, dir);
            case RunMode::Validate:
                return run_validate(cfg, opts, dir);
        }
    } catch (const ConfigError& e) {
        err_stream(opts) << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err_stream(opts) << "error: " << e.what() << '\n';
        return 1;
    } catch (const MonotonicityViolation& e) {
        err_stream(opts) << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err_stream(opts) << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

int run_file(const std::string& config_path, const CliOptions& opts) {
    try {
        return run(parse_run_config(config_path), opts);
    } catch (const ConfigError& e) {
        err_stream(opts) << "error: " << e.what() << '\n';
        return 1;
    }
}

int sweep(const RunConfig& cfg, const std::string& parameter, const std::vector<double>& values,
          const CliOptions& opts) {
    static const std::vector<std::string> kParams = {"k", "mu_bar", "sigma_tilde", "sigma", "rho"};
    if (std::find(kParams.begin(), kParams.end(), parameter) == kParams.end()) {
        err_stream(opts) << "error: sweep parameter must be one of k, mu_bar, sigma_tilde, "
                            "sigma, rho\n";
        return 1;
    }
    if (values.empty()) {
        err_stream(opts) << "error: sweep values: empty list\n";
        return 1;
    }

    const fs::path dir = opts.out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(opts.out_dir);
    fs::create_directories(dir);

    std::string summary = "param,value,muStar,xBarAtMuBar,iterations,haltReason\n";
    int exit_code = 0;
    for (double value : values) {
        json sub = cfg.resolved;
        sub["mode"] = "base";
        if (parameter == "sigma" || parameter == "rho")
            sub["model"][parameter] = value;
        else
            sub["drift"][parameter] = value;

        std::ostringstream label;
        label << "sweep_" << parameter << "_" << value;
        summary += parameter;
        summary += ',';
        summary += format_double(value);
        summary += ',';
        try {
            RunConfig sub_cfg = parse_run_config_json(sub);
            CliOptions sub_opts = opts;
            sub_opts.out_dir = (dir / label.str()).string();
            BaseRun base = solve_base(sub_cfg, sub_opts);
            const int code = write_solution_artifacts(sub_cfg, sub_opts.out_dir, base.grid,
                                                      base.sol.value, base.sol.policy,
                                                      base.boundaries, base.sol.report, false);
            exit_code = std::max(exit_code, code);

            double mu_bar_now = value;
            if (parameter != "mu_bar") {
                if (const auto* ou = std::get_if<OrnsteinUhlenbeck>(&sub_cfg.model.drift.variant))
                    mu_bar_now = ou->mu_bar;
                else if (const auto* cir =
                             std::get_if<CoxIngersollRoss>(&sub_cfg.model.drift.variant))
                    mu_bar_now = cir->mu_bar;
            }
            const int j_bar = base.grid.nearest_column(mu_bar_now);
            if (base.boundaries.mu_star) summary += format_double(*base.boundaries.mu_star);
            summary += ',';
            if (base.boundaries.upper[j_bar])
                summary += format_double(*base.boundaries.upper[j_bar]);
            summary += ',';
            summary += std::to_string(base.sol.report.iterations);
            summary += ',';
            summary += to_string(base.sol.report.halt_reason);
        } catch (const std::exception& e) {
            err_stream(opts) << "sweep " << parameter << "=" << value << " failed: " << e.what()
                             << '\n';
            summary += ",,0,ERROR";
            exit_code = std::max(exit_code, 1);
        }
        summary += '\n';
    }
    write_text_atomic(dir / "summary.csv", summary);
    return exit_code;
}

int sweep_file(const std::string& config_path, const std::string& parameter,
               const std::vector<double>& values, const CliOptions& opts) {
    try {
        return sweep(parse_run_config(config_path), parameter, values, opts);
    } catch (const ConfigError& e) {
        err_stream(opts) << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace divopt

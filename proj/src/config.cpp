#include "divopt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace divopt {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Base: return "base";
        case RunMode::ProportionalIssuance: return "proportional_issuance";
        case RunMode::FixedIssuance: return "fixed_issuance";
        case RunMode::CreditLine: return "credit_line";
        case RunMode::Deterministic: return "deterministic";
        case RunMode::Auxiliary: return "auxiliary";
        case RunMode::Mc: return "mc";
        case RunMode::Validate: return "validate";
    }
    return "base";
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError(field + ": " + what);
}

const json& section(const json& root, const char* name) {
    static const json empty = json::object();
    if (!root.contains(name)) return empty;
    if (!root.at(name).is_object()) fail(name, "expected an object");
    return root.at(name);
}

double get_num(const json& sec, const std::string& prefix, const char* name, double def) {
    if (!sec.contains(name)) return def;
    if (!sec.at(name).is_number()) fail(prefix + "." + name, "expected a number");
    return sec.at(name).get<double>();
}

int get_int(const json& sec, const std::string& prefix, const char* name, int def) {
    if (!sec.contains(name)) return def;
    if (!sec.at(name).is_number_integer()) fail(prefix + "." + name, "expected an integer");
    return sec.at(name).get<int>();
}

std::string get_str(const json& sec, const std::string& prefix, const char* name,
                    const std::string& def) {
    if (!sec.contains(name)) return def;
    if (!sec.at(name).is_string()) fail(prefix + "." + name, "expected a string");
    return sec.at(name).get<std::string>();
}

RunMode parse_mode(const std::string& s) {
    if (s == "base") return RunMode::Base;
    if (s == "proportional_issuance") return RunMode::ProportionalIssuance;
    if (s == "fixed_issuance") return RunMode::FixedIssuance;
    if (s == "credit_line") return RunMode::CreditLine;
    if (s == "deterministic") return RunMode::Deterministic;
    if (s == "auxiliary") return RunMode::Auxiliary;
    if (s == "mc") return RunMode::Mc;
    if (s == "validate") return RunMode::Validate;
    fail("mode", "unknown mode '" + s + "'");
}

/// Cost curve: {"const": c} or {"hi": ..., "lo": ..., "mid": ..., "scale": ...}.
std::function<double(double)> parse_cost(const json& sec, const std::string& prefix,
                                         const char* name, double default_const,
                                         json& echo_out) {
    if (!sec.contains(name)) {
        echo_out = json{{"const", default_const}};
        return [default_const](double) { return default_const; };
    }
    const json& c = sec.at(name);
    const std::string field = prefix + "." + name;
    if (c.is_number()) {
        const double v = c.get<double>();
        echo_out = json{{"const", v}};
        return [v](double) { return v; };
    }
    if (!c.is_object()) fail(field, "expected a number or an object");
    if (c.contains("const")) {
        const double v = get_num(c, field, "const", 0.0);
        echo_out = json{{"const", v}};
        return [v](double) { return v; };
    }
    if (!c.contains("hi") || !c.contains("lo"))
        fail(field, "expected either 'const' or 'hi'/'lo'/'mid'/'scale'");
    const double hi = get_num(c, field, "hi", 0.0);
    const double lo = get_num(c, field, "lo", 0.0);
    const double mid = get_num(c, field, "mid", 0.0);
    const double scale = get_num(c, field, "scale", 0.3);
    if (!(scale > 0.0)) fail(field + ".scale", "must be > 0");
    echo_out = json{{"hi", hi}, {"lo", lo}, {"mid", mid}, {"scale", scale}};
    return logistic_cost(hi, lo, mid, scale);
}

}  // namespace

RunConfig parse_run_config_json(const json& root) {
    if (!root.is_object()) fail("config", "top level must be an object");

    const json& model_sec = section(root, "model");
    const json& drift_sec = section(root, "drift");
    const double r = get_num(model_sec, "model", "r", 0.05);
    const double sigma = get_num(model_sec, "model", "sigma", 0.1);
    const double rho = get_num(model_sec, "model", "rho", 0.0);

    const std::string kind = get_str(drift_sec, "drift", "kind", "ou");
    const double k = get_num(drift_sec, "drift", "k", 0.5);
    const double mu_bar = get_num(drift_sec, "drift", "mu_bar", 0.15);
    const double sigma_tilde = get_num(drift_sec, "drift", "sigma_tilde", 0.3);

    DriftSpec drift = [&] {
        try {
            if (kind == "ou") return DriftSpec::ou(k, mu_bar, sigma_tilde);
            if (kind == "cir")
                return DriftSpec::cir(k, mu_bar, sigma_tilde,
                                      get_num(drift_sec, "drift", "a", 0.0));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        fail("drift.kind", "must be 'ou' or 'cir' (custom drifts are API-only)");
    }();

    RunConfig cfg = [&]() -> RunConfig {
        try {
            return RunConfig{.model = ModelParams(r, sigma, rho, drift)};
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }();

    cfg.mode = parse_mode(get_str(root, "config", "mode", "base"));

    const json& grid_sec = section(root, "grid");
    const int nx = get_int(grid_sec, "grid", "nx", 300);
    const int nmu = get_int(grid_sec, "grid", "nmu", 300);
    GridSpec def = GridSpec::defaults_for(cfg.model, nx, nmu);
    cfg.grid = def;
    cfg.grid.x_max = get_num(grid_sec, "grid", "x_max", def.x_max);
    cfg.grid.mu_min = get_num(grid_sec, "grid", "mu_min", def.mu_min);
    cfg.grid.mu_max = get_num(grid_sec, "grid", "mu_max", def.mu_max);

    json echo;
    echo["mode"] = to_string(cfg.mode);
    echo["model"] = {{"r", r}, {"sigma", sigma}, {"rho", rho}};
    echo["drift"] = {{"kind", kind}, {"k", k}, {"mu_bar", mu_bar}, {"sigma_tilde", sigma_tilde}};
    if (kind == "cir") echo["drift"]["a"] = get_num(drift_sec, "drift", "a", 0.0);
    echo["grid"] = {{"x_max", cfg.grid.x_max},
                    {"mu_min", cfg.grid.mu_min},
                    {"mu_max", cfg.grid.mu_max},
                    {"nx", nx},
                    {"nmu", nmu}};

    // Mode-specific sections.
    if (cfg.mode == RunMode::ProportionalIssuance || cfg.mode == RunMode::FixedIssuance) {
        const json& iss = section(root, "issuance");
        IssuanceSpec spec;
        json echo_p, echo_f;
        spec.lambda_p = parse_cost(iss, "issuance", "lambda_p", 0.25, echo_p);
        const double lf_default = cfg.mode == RunMode::FixedIssuance ? 0.1 : 0.0;
        spec.lambda_f = parse_cost(iss, "issuance", "lambda_f", lf_default, echo_f);
        cfg.issuance = std::move(spec);
        echo["issuance"] = {{"lambda_p", echo_p}, {"lambda_f", echo_f}};
    }

    double x_lower_min = 0.0;
    if (cfg.mode == RunMode::CreditLine) {
        const json& credit = section(root, "credit");
        CreditLineSpec spec;
        spec.rho_minus = get_num(credit, "credit", "rho_minus", 0.0);
        json echo_credit = {{"rho_minus", spec.rho_minus}};
        if (credit.contains("x_lower") && credit.at("x_lower").is_object()) {
            const json& table = credit.at("x_lower");
            if (!table.contains("mu") || !table.contains("x"))
                fail("credit.x_lower", "table needs 'mu' and 'x' arrays");
            std::vector<double> mus = table.at("mu").get<std::vector<double>>();
            std::vector<double> xs = table.at("x").get<std::vector<double>>();
            if (mus.size() != xs.size() || mus.size() < 2)
                fail("credit.x_lower", "'mu' and 'x' must have equal length >= 2");
            for (std::size_t s = 1; s < mus.size(); ++s)
                if (!(mus[s] > mus[s - 1])) fail("credit.x_lower.mu", "must be increasing");
            spec.x_lower = [mus, xs](double mu) {
                if (mu <= mus.front()) return xs.front();
                if (mu >= mus.back()) return xs.back();
                const auto it = std::upper_bound(mus.begin(), mus.end(), mu);
                const auto s = static_cast<std::size_t>(it - mus.begin());
                const double t = (mu - mus[s - 1]) / (mus[s] - mus[s - 1]);
                return (1.0 - t) * xs[s - 1] + t * xs[s];
            };
            x_lower_min = *std::min_element(xs.begin(), xs.end());
            echo_credit["x_lower"] = {{"mu", mus}, {"x", xs}};
        } else {
            const double xl = get_num(credit, "credit", "x_lower", -0.95);
            spec.x_lower = [xl](double) { return xl; };
            x_lower_min = xl;
            echo_credit["x_lower"] = xl;
        }
        if (!(x_lower_min <= 0.0)) fail("credit.x_lower", "must be <= 0");
        cfg.credit = std::move(spec);
        echo["credit"] = echo_credit;

        // Widen the grid below zero at the configured resolution, keeping
        // x = 0 on a node.
        const double dx = cfg.grid.x_max / (nx - 1);
        const int extra = static_cast<int>(std::ceil(-x_lower_min / dx - 1e-9));
        cfg.grid.x_min = -extra * dx;
        cfg.grid.nx = nx + extra;
    }

    const json& solver_sec = section(root, "solver");
    const double dx = (cfg.grid.x_max - cfg.grid.x_min) / (cfg.grid.nx - 1);
    if (solver_sec.contains("K") && solver_sec.at("K").is_number()) {
        cfg.K = solver_sec.at("K").get<double>();
    } else {
        const std::string k_mode =
            solver_sec.contains("K") ? get_str(solver_sec, "solver", "K", "auto") : "auto";
        if (k_mode != "auto") fail("solver.K", "expected a number or \"auto\"");
        cfg.K = 100.0 / dx;
    }
    if (!(cfg.K > 0.0)) fail("solver.K", "must be > 0");
    cfg.tau = get_num(solver_sec, "solver", "tau", 0.0);
    if (!(cfg.tau >= 0.0)) fail("solver.tau", "must be >= 0");
    cfg.max_iter = get_int(solver_sec, "solver", "max_iter", 200);
    if (cfg.max_iter < 1) fail("solver.max_iter", "must be >= 1");
    cfg.grad_const = get_num(solver_sec, "solver", "grad_const",
                             10.0 * cfg.model.r * cfg.grid.x_max);
    if (solver_sec.contains("k_schedule")) {
        if (!solver_sec.at("k_schedule").is_array()) fail("solver.k_schedule", "expected an array");
        cfg.k_schedule = solver_sec.at("k_schedule").get<std::vector<double>>();
    }
    const std::string linear = get_str(solver_sec, "solver", "linear", "auto");
    if (linear == "auto")
        cfg.linear = SolverControls::Linear::Auto;
    else if (linear == "direct")
        cfg.linear = SolverControls::Linear::Direct;
    else if (linear == "iterative")
        cfg.linear = SolverControls::Linear::Iterative;
    else
        fail("solver.linear", "expected auto, direct, or iterative");

    echo["solver"] = {{"K", cfg.K},
                      {"tau", cfg.tau},
                      {"max_iter", cfg.max_iter},
                      {"linear", linear},
                      {"grad_const", cfg.grad_const}};
    if (!cfg.k_schedule.empty()) echo["solver"]["k_schedule"] = cfg.k_schedule;

    {
        const json& mc_sec = section(root, "mc");
        cfg.mc.sim.n_paths = get_int(mc_sec, "mc", "n_paths", 100000);
        cfg.mc.sim.dt = get_num(mc_sec, "mc", "dt", 1e-3);
        cfg.mc.sim.t_horizon = get_num(mc_sec, "mc", "t_horizon", 0.0);
        cfg.mc.sim.seed = static_cast<std::uint64_t>(
            get_num(mc_sec, "mc", "seed", 12345.0));
        if (mc_sec.contains("points")) {
            if (!mc_sec.at("points").is_array()) fail("mc.points", "expected an array of [x, mu]");
            for (const auto& p : mc_sec.at("points")) {
                if (!p.is_array() || p.size() != 2) fail("mc.points", "each point must be [x, mu]");
                cfg.mc.points.emplace_back(p[0].get<double>(), p[1].get<double>());
            }
        } else {
            cfg.mc.points = {{0.5, 0.15}};
        }
        if (cfg.mode == RunMode::Mc) {
            json pts = json::array();
            for (auto [x, mu] : cfg.mc.points) pts.push_back(json::array({x, mu}));
            echo["mc"] = {{"n_paths", cfg.mc.sim.n_paths},
                          {"dt", cfg.mc.sim.dt},
                          {"t_horizon", cfg.mc.sim.t_horizon},
                          {"seed", cfg.mc.sim.seed},
                          {"points", pts}};
        }
    }

    {
        const json& val_sec = section(root, "validate");
        cfg.validate.interval =
            Interval{get_num(val_sec, "validate", "mu_lo", cfg.grid.mu_min),
                     get_num(val_sec, "validate", "mu_hi", cfg.grid.mu_max)};
        cfg.validate.n_samples = get_int(val_sec, "validate", "n_samples", 101);
        if (cfg.mode == RunMode::Validate)
            echo["validate"] = {{"mu_lo", cfg.validate.interval.lo},
                                {"mu_hi", cfg.validate.interval.hi},
                                {"n_samples", cfg.validate.n_samples}};
    }

    cfg.output_dir = get_str(root, "config", "output", "out");
    echo["output"] = cfg.output_dir;
    cfg.resolved = std::move(echo);
    return cfg;
}

RunConfig parse_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not readable: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return parse_run_config_json(root);
}

}  // namespace divopt

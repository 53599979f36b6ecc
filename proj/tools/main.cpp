#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "divopt/cli.hpp"

namespace {

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        out.push_back(std::stod(token));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"divopt: optimal dividend policies under stochastic profitability"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd, bool config_required = true) {
        cmd->add_option("--config", config_path, "path to the JSON run configuration")
            ->required(config_required);
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--threads", threads, "worker threads for simulation");
        cmd->add_option("--seed", seed, "Monte Carlo seed override")
            ->each([&](const std::string&) { seed_set = true; });
    };

    CLI::App* solve = app.add_subcommand("solve", "solve the configured problem");
    add_common(solve);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "comparative statics over one parameter");
    add_common(sweep_cmd);
    std::string sweep_param;
    std::string sweep_values;
    sweep_cmd->add_option("--param", sweep_param, "k, mu_bar, sigma_tilde, sigma, or rho")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated parameter values")
        ->required();
    CLI::App* deterministic =
        app.add_subcommand("deterministic", "closed-form deterministic boundary table");
    add_common(deterministic);
    CLI::App* auxiliary = app.add_subcommand("auxiliary", "1-D real-option value and threshold");
    add_common(auxiliary);
    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo cross-check of the grid solution");
    add_common(mc);
    CLI::App* validate = app.add_subcommand("validate", "check drift assumptions by sampling");
    add_common(validate);

    CLI11_PARSE(app, argc, argv);

    divopt::CliOptions opts;
    opts.out_dir = out_dir;
    opts.threads = threads;
    if (seed_set) opts.seed = seed;
    const char* log_env = std::getenv("DIVOPT_LOG");
    const bool quiet = log_env && std::string(log_env) == "quiet";
    opts.diag = quiet ? nullptr : &std::cerr;

    auto force_mode = [&](const char* mode) {
        try {
            divopt::RunConfig cfg = divopt::parse_run_config(config_path);
            if (divopt::to_string(cfg.mode) != mode) {
                nlohmann::json patched = cfg.resolved;
                patched["mode"] = mode;
                cfg = divopt::parse_run_config_json(patched);
            }
            return divopt::run(cfg, opts);
        } catch (const divopt::ConfigError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    };

    if (*solve) return divopt::run_file(config_path, opts);
    if (*sweep_cmd) return divopt::sweep_file(config_path, sweep_param, parse_values(sweep_values), opts);
    if (*deterministic) return force_mode("deterministic");
    if (*auxiliary) return force_mode("auxiliary");
    if (*mc) return force_mode("mc");
    if (*validate) return force_mode("validate");
    return 1;
}

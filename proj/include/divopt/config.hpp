#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "divopt/extensions.hpp"
#include "divopt/grid.hpp"
#include "divopt/mc.hpp"
#include "divopt/model.hpp"
#include "divopt/solver.hpp"

#include <json.hpp>

namespace divopt {

/// Configuration problems; the message names the offending field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode {
    Base,
    ProportionalIssuance,
    FixedIssuance,
    CreditLine,
    Deterministic,
    Auxiliary,
    Mc,
    Validate
};

std::string to_string(RunMode mode);

struct McRunConfig {
    SimConfig sim;
    std::vector<std::pair<double, double>> points;  // (x, mu) query points
};

struct ValidateRunConfig {
    Interval interval;
    int n_samples = 101;
};

/// Fully resolved run configuration: defaults applied, "auto" values resolved,
/// and `resolved` holding the JSON echo that reproduces this run bit for bit.
struct RunConfig {
    RunMode mode = RunMode::Base;
    ModelParams model;
    GridSpec grid;

    double K = 0.0;
    double tau = 0.0;
    int max_iter = 200;
    std::vector<double> k_schedule;
    SolverControls::Linear linear = SolverControls::Linear::Auto;
    double grad_const = 0.0;

    std::optional<IssuanceSpec> issuance;
    std::optional<CreditLineSpec> credit;
    McRunConfig mc;
    ValidateRunConfig validate;

    std::string output_dir = "out";
    nlohmann::json resolved;
};

RunConfig parse_run_config_json(const nlohmann::json& j);
RunConfig parse_run_config(const std::string& path);

}  // namespace divopt

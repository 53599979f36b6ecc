#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "divopt/config.hpp"

namespace divopt {

struct CliOptions {
    std::string out_dir;  // overrides config output when non-empty
    int threads = 0;
    std::optional<std::uint64_t> seed;
    std::ostream* diag = nullptr;  // solver progress lines
    std::ostream* out = nullptr;   // user-facing output
    std::ostream* err = nullptr;   // error messages
};

/// Runs one configured job and writes its artifacts. Exit status: 0 on
/// success/convergence, 2 when policy iteration hits max_iter, 1 on
/// configuration or validation errors.
int run(const RunConfig& cfg, const CliOptions& opts);
int run_file(const std::string& config_path, const CliOptions& opts);

/// Re-runs the base solve for each parameter value on the shared grid;
/// failures are recorded per value and remaining values still run.
int sweep(const RunConfig& cfg, const std::string& parameter, const std::vector<double>& values,
          const CliOptions& opts);
int sweep_file(const std::string& config_path, const std::string& parameter,
               const std::vector<double>& values, const CliOptions& opts);

}  // namespace divopt

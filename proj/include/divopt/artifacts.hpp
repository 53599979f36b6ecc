#pragma once

#include <filesystem>
#include <string>

#include "divopt/analysis.hpp"
#include "divopt/fields.hpp"
#include "divopt/grid.hpp"
#include "divopt/solver.hpp"

#include <json.hpp>

namespace divopt {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Writes via a same-directory temp file and rename, so partial artifacts are
/// never left behind.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// Header "mu,divLower,divUpper" plus ",issuanceTarget" when requested;
/// ABSENT values serialize as empty fields.
std::string boundaries_csv(const Boundaries& boundaries, bool with_issuance_target);

/// Header "x,mu,V,ell"; one row per node, mu-major.
std::string value_csv(const Grid& grid, const ValueField& value, const PolicyField& policy);

nlohmann::json report_json(const SolveReport& report);

}  // namespace divopt

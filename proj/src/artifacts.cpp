#include "divopt/artifacts.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace divopt {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out.good()) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string boundaries_csv(const Boundaries& b, bool with_issuance_target) {
    std::string out = "mu,divLower,divUpper";
    if (with_issuance_target) out += ",issuanceTarget";
    out += '\n';
    for (std::size_t j = 0; j < b.mus.size(); ++j) {
        out += format_double(b.mus[j]);
        out += ',';
        if (b.lower[j]) out += format_double(*b.lower[j]);
        out += ',';
        if (b.upper[j]) out += format_double(*b.upper[j]);
        if (with_issuance_target) {
            out += ',';
            if (j < b.issuance_target.size() && b.issuance_target[j])
                out += format_double(*b.issuance_target[j]);
        }
        out += '\n';
    }
    return out;
}

std::string value_csv(const Grid& grid, const ValueField& value, const PolicyField& policy) {
    std::string out = "x,mu,V,ell\n";
    out.reserve(static_cast<std::size_t>(grid.num_nodes()) * 40);
    for (int j = 0; j < grid.nmu(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            out += format_double(grid.x(i));
            out += ',';
            out += format_double(grid.mu(j));
            out += ',';
            out += format_double(value(i, j));
            out += ',';
            out += format_double(policy(i, j));
            out += '\n';
        }
    }
    return out;
}

nlohmann::json report_json(const SolveReport& report) {
    return nlohmann::json{{"iterations", report.iterations},
                          {"residual_history", report.residual_history},
                          {"min_increment_history", report.min_increment_history},
                          {"halt_reason", to_string(report.halt_reason)},
                          {"wall_time_seconds", report.wall_time_seconds},
                          {"linear_solver", report.linear_solver}};
}

}  // namespace divopt

#include "divopt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace divopt {

int Boundaries::column_of(double mu) const {
    const double step = mus.size() > 1 ? mus[1] - mus[0] : 1.0;
    const auto j = static_cast<long>(std::lround((mu - mus.front()) / step));
    return static_cast<int>(std::clamp<long>(j, 0, static_cast<long>(mus.size()) - 1));
}

Boundaries extract_boundaries(const PolicyField& policy, const Grid& grid, double K) {
    return extract_boundaries(policy, grid, K, ExtractOptions{});
}

namespace {

/// Sub-cell position of the discrete V_x = 1 crossing between rows i and i+1.
double refine_level_set(const ValueField& value, const Grid& grid, int i_retain, int i_pay, int j) {
    const double dx = grid.dx();
    const int lo = std::min(i_retain, i_pay);
    if (lo + 1 >= value.nx) return grid.x(i_retain);
    auto fwd = [&](int i) { return (value(i + 1, j) - value(i, j)) / dx; };
    const double g_retain = fwd(std::min(i_retain, value.nx - 2));
    const double g_pay = fwd(std::min(i_pay, value.nx - 2));
    if (!(g_retain > 1.0) || !(g_retain > g_pay)) return grid.x(i_retain);
    const double t = std::clamp((g_retain - 1.0) / (g_retain - g_pay), 0.0, 1.0);
    const double direction = i_pay > i_retain ? 1.0 : -1.0;
    return grid.x(i_retain) + direction * t * dx;
}

}  // namespace

Boundaries extract_boundaries(const PolicyField& policy, const Grid& grid, double K,
                              const ExtractOptions& opts) {
    const int nx = grid.nx();
    const int nmu = grid.nmu();
    if (policy.nx != nx || policy.nmu != nmu)
        throw std::invalid_argument("policy field does not match the grid");
    if (!opts.floor_row.empty() && static_cast<int>(opts.floor_row.size()) != nmu)
        throw std::invalid_argument("floor_row size does not match the grid");

    const double threshold = 0.5 * K;  // converged policies are bang-bang; any cut in (0, K) works

    Boundaries out;
    out.mus = grid.mus;
    out.lower.assign(nmu, std::nullopt);
    out.upper.assign(nmu, std::nullopt);
    out.x_min = grid.spec.x_min;
    out.x_max = grid.spec.x_max;

    std::vector<char> full_payout(nmu, 0);
    for (int j = 0; j < nmu; ++j) {
        const int floor = opts.floor_row.empty() ? 0 : opts.floor_row[j];
        int i_lo = -1, i_hi = -1, retain_count = 0;
        for (int i = floor; i < nx; ++i) {
            if (policy(i, j) < threshold) {
                if (i_lo < 0) i_lo = i;
                i_hi = i;
                ++retain_count;
            }
        }
        if (i_lo < 0) {
            full_payout[j] = 1;
            continue;
        }
        if (retain_count != i_hi - i_lo + 1) out.non_contiguous_columns.push_back(grid.mu(j));

        double lo_x = grid.x(i_lo);
        double hi_x = grid.x(i_hi);
        if (opts.refine_with_value) {
            if (i_lo > floor) lo_x = refine_level_set(*opts.refine_with_value, grid, i_lo, i_lo - 1, j);
            if (i_hi < nx - 1) hi_x = refine_level_set(*opts.refine_with_value, grid, i_hi, i_hi + 1, j);
        }
        out.lower[j] = lo_x;
        out.upper[j] = hi_x;
        if (i_hi >= nx - 2) out.truncation_warning = true;
    }

    // Liquidation threshold: full-payout columns forming a block at mu_min.
    int j_block = 0;
    while (j_block < nmu && full_payout[j_block]) ++j_block;
    if (j_block > 0) out.mu_star = grid.mu(j_block - 1);
    for (int j = j_block; j < nmu; ++j)
        if (full_payout[j]) out.anomaly_columns.push_back(grid.mu(j));

    return out;
}

Regime classify_point(const Boundaries& boundaries, double x, double mu) {
    if (boundaries.mus.empty()) throw std::logic_error("empty boundaries");
    if (x < boundaries.x_min || x > boundaries.x_max || mu < boundaries.mus.front() ||
        mu > boundaries.mus.back())
        throw std::domain_error("classify_point: point outside the grid box");

    if (boundaries.mu_star && mu <= *boundaries.mu_star) return Regime::Liquidate;
    const int j = boundaries.column_of(mu);
    if (!boundaries.lower[j] || !boundaries.upper[j]) return Regime::Liquidate;
    if (x < *boundaries.lower[j]) return Regime::Liquidate;
    if (x > *boundaries.upper[j]) return Regime::PayExcess;
    return Regime::Retain;
}

}  // namespace divopt

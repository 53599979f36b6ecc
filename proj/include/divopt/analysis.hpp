#pragma once

#include <optional>
#include <vector>

#include "divopt/fields.hpp"
#include "divopt/grid.hpp"

namespace divopt {

enum class Regime { Retain, PayExcess, Liquidate };

/// Free boundaries extracted from a converged policy, one entry per mu column.
/// ABSENT (nullopt) columns have no retain nodes: the whole column pays out.
struct Boundaries {
    std::vector<double> mus;
    std::vector<std::optional<double>> lower;  // liquidation boundary x_(mu)
    std::vector<std::optional<double>> upper;  // dividend boundary x^(mu)
    std::optional<double> mu_star;             // full-payout block attached to mu_min
    std::vector<std::optional<double>> issuance_target;  // fixed-cost issuance only
    std::optional<double> issuance_threshold;            // smallest issuing mu (extensions)

    // Diagnostics.
    std::vector<double> non_contiguous_columns;  // retain set had gaps
    std::vector<double> anomaly_columns;         // full payout detached from the block
    bool truncation_warning = false;             // retain region touches the top row

    double x_min = 0.0;
    double x_max = 0.0;

    int column_of(double mu) const;
};

struct ExtractOptions {
    /// Refine boundaries one sub-cell step by interpolating the discrete
    /// V_x = 1 level set; node resolution when null.
    const ValueField* refine_with_value = nullptr;
    /// Per-column lowest live row (credit-line mode); empty means row 0.
    std::vector<int> floor_row;
};

Boundaries extract_boundaries(const PolicyField& policy, const Grid& grid, double K);
Boundaries extract_boundaries(const PolicyField& policy, const Grid& grid, double K,
                              const ExtractOptions& opts);

/// Classifies a point of the state space against extracted boundaries.
/// The retain region includes both of its boundary curves; throws
/// std::domain_error outside the grid box.
Regime classify_point(const Boundaries& boundaries, double x, double mu);

}  // namespace divopt

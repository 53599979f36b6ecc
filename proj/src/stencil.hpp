#pragma once

// Shared interior-row stencil math for assembly and policy improvement.

#include <algorithm>
#include <cmath>

#include "divopt/fields.hpp"
#include "divopt/grid.hpp"
#include "divopt/model.hpp"

namespace divopt::detail {

/// Per-column coefficients that do not depend on the controls.
struct ColumnCoeffs {
    double mu;
    double kappa;
    double half_st2;   // sigma_tilde^2 / 2
    double cross;      // rho * sigma * sigma_tilde (signed)
};

inline ColumnCoeffs column_coeffs(const ModelParams& model, double mu) {
    const double st = model.sigma_tilde(mu);
    return ColumnCoeffs{mu, model.kappa(mu), 0.5 * st * st, model.rho * model.sigma * st};
}

/// One interior row of A = r I - L^(ell,iota) against the 3x3 neighborhood.
/// Neighbor order: +x, -x, +mu, -mu, (+x,+mu), (-x,-mu), (+x,-mu), (-x,+mu).
struct InteriorRow {
    double diag;
    double nb[8];
    bool has_cross;
    int cross_sign;  // +1 main diagonal, -1 anti-diagonal

    template <typename GetV>
    double apply(double v_center, GetV&& v) const {
        double acc = diag * v_center + nb[0] * v(+1, 0) + nb[1] * v(-1, 0) + nb[2] * v(0, +1) +
                     nb[3] * v(0, -1);
        if (has_cross) {
            if (cross_sign > 0)
                acc += nb[4] * v(+1, +1) + nb[5] * v(-1, -1);
            else
                acc += nb[6] * v(+1, -1) + nb[7] * v(-1, +1);
        }
        return acc;
    }
};

/// Builds the interior row for cash drift bx (already including controls and
/// any credit-line interest) and profitability drift kappa.
inline InteriorRow interior_row(const ModelParams& model, const Grid& grid,
                                const ColumnCoeffs& col, double bx) {
    const double dx = grid.dx();
    const double dmu = grid.dmu();
    const double hx = 0.5 * model.sigma * model.sigma / (dx * dx);
    const double hm = col.half_st2 / (dmu * dmu);
    const double w = std::abs(col.cross) / (2.0 * dx * dmu);

    const double bx_p = std::max(bx, 0.0) / dx;
    const double bx_m = std::max(-bx, 0.0) / dx;
    const double bm_p = std::max(col.kappa, 0.0) / dmu;
    const double bm_m = std::max(-col.kappa, 0.0) / dmu;

    InteriorRow row{};
    row.has_cross = col.cross != 0.0;
    row.cross_sign = col.cross > 0.0 ? +1 : -1;

    // Generator coefficients (all nonnegative under the cross-term condition);
    // A carries them negated off the diagonal.
    row.nb[0] = -(bx_p + hx - w);
    row.nb[1] = -(bx_m + hx - w);
    row.nb[2] = -(bm_p + hm - w);
    row.nb[3] = -(bm_m + hm - w);
    row.nb[4] = row.nb[5] = row.nb[6] = row.nb[7] = 0.0;
    if (row.has_cross) {
        if (row.cross_sign > 0)
            row.nb[4] = row.nb[5] = -w;
        else
            row.nb[6] = row.nb[7] = -w;
    }
    row.diag = model.r + bx_p + bx_m + bm_p + bm_m + 2.0 * hx + 2.0 * hm - 2.0 * w;
    return row;
}

}  // namespace divopt::detail

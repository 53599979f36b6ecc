#include "divopt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace divopt {

GridSpec GridSpec::defaults_for(const ModelParams& model, int nx, int nmu) {
    GridSpec spec;
    spec.x_max = 5.0;
    spec.nx = nx;
    spec.nmu = nmu;

    double mu_bar = 0.0;
    double half_width = 2.0;
    if (const auto* ou = std::get_if<OrnsteinUhlenbeck>(&model.drift.variant)) {
        mu_bar = ou->mu_bar;
        half_width = 6.0 * ou->sigma_tilde / std::sqrt(2.0 * ou->k);
    } else if (const auto* cir = std::get_if<CoxIngersollRoss>(&model.drift.variant)) {
        mu_bar = cir->mu_bar;
        half_width = 6.0 * model.sigma_tilde(mu_bar) / std::sqrt(2.0 * cir->k);
    }
    spec.mu_min = std::min(mu_bar - half_width, -2.0);
    spec.mu_max = std::max(mu_bar + half_width, 2.0);

    const Interval dom = model.domain();
    if (spec.mu_min < dom.lo) {
        // CIR-style half line: start one cell above the degenerate boundary.
        spec.mu_min = dom.lo + (spec.mu_max - dom.lo) / (nmu - 1);
    }
    if (spec.mu_max > dom.hi) spec.mu_max = dom.hi;
    return spec;
}

int Grid::nearest_column(double mu) const {
    const int j = static_cast<int>(std::lround((mu - spec.mu_min) / dmu_));
    return std::clamp(j, 0, spec.nmu - 1);
}

int Grid::nearest_row(double x) const {
    const int i = static_cast<int>(std::lround((x - spec.x_min) / dx_));
    return std::clamp(i, 0, spec.nx - 1);
}

Grid build(const GridSpec& spec, const ModelParams& model) {
    if (spec.nx < 3) throw std::invalid_argument("grid.nx: must be >= 3");
    if (spec.nmu < 3) throw std::invalid_argument("grid.nmu: must be >= 3");
    if (!(spec.x_max > spec.x_min))
        throw std::invalid_argument("grid.x_max: must exceed the lower x bound");
    if (!(spec.mu_min < spec.mu_max))
        throw std::invalid_argument("grid.mu_min: must be below grid.mu_max");

    const Interval dom = model.domain();
    if (!dom.contains(spec.mu_min) || !dom.contains(spec.mu_max))
        throw std::invalid_argument("grid mu range: outside the drift domain [" +
                                    std::to_string(dom.lo) + ", " + std::to_string(dom.hi) + "]");
    if (spec.mu_min == dom.lo && model.sigma_tilde(dom.lo) == 0.0 &&
        !spec.allow_degenerate_mu_boundary)
        throw std::invalid_argument(
            "grid.mu_min: sigma_tilde vanishes there; start one cell above or set "
            "allow_degenerate_mu_boundary");

    Grid grid;
    grid.spec = spec;
    grid.dx_ = (spec.x_max - spec.x_min) / (spec.nx - 1);
    grid.dmu_ = (spec.mu_max - spec.mu_min) / (spec.nmu - 1);

    grid.xs.resize(spec.nx);
    for (int i = 0; i < spec.nx; ++i) grid.xs[i] = spec.x_min + i * grid.dx_;
    grid.mus.resize(spec.nmu);
    for (int j = 0; j < spec.nmu; ++j) grid.mus[j] = spec.mu_min + j * grid.dmu_;

    grid.tags.resize(static_cast<std::size_t>(spec.nx) * spec.nmu);
    for (int j = 0; j < spec.nmu; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            const bool x_edge = (i == 0 || i == spec.nx - 1);
            const bool mu_edge = (j == 0 || j == spec.nmu - 1);
            NodeTag tag = NodeTag::Interior;
            if (x_edge && mu_edge)
                tag = NodeTag::Corner;
            else if (i == 0)
                tag = NodeTag::XZero;
            else if (i == spec.nx - 1)
                tag = NodeTag::XMax;
            else if (j == 0)
                tag = NodeTag::MuMin;
            else if (j == spec.nmu - 1)
                tag = NodeTag::MuMax;
            grid.tags[static_cast<std::size_t>(grid.index(i, j))] = tag;
        }
    }
    return grid;
}

}  // namespace divopt

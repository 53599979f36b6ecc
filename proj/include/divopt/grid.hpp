#pragma once

#include <cstdint>
#include <vector>

#include "divopt/model.hpp"

namespace divopt {

enum class NodeTag : std::uint8_t { Interior, XZero, XMax, MuMin, MuMax, Corner };

/// Rectangular (x, mu) discretization. x nodes are uniform on [x_min, x_max]
/// (x_min = 0 unless a credit line shifts the domain), mu nodes uniform on
/// [mu_min, mu_max].
struct GridSpec {
    double x_max;
    double mu_min;
    double mu_max;
    int nx;
    int nmu;
    double x_min = 0.0;
    /// Permit mu_min on the domain boundary where sigma_tilde vanishes (CIR at a).
    bool allow_degenerate_mu_boundary = false;

    /// Default truncation for a model: x in [0, 5] and mu covering six
    /// stationary standard deviations around the long-run mean, at least [-2, 2].
    static GridSpec defaults_for(const ModelParams& model, int nx = 300, int nmu = 300);
};

struct Grid {
    GridSpec spec;
    std::vector<double> xs;
    std::vector<double> mus;
    std::vector<NodeTag> tags;  // one tag per node, size nx * nmu

    int nx() const { return spec.nx; }
    int nmu() const { return spec.nmu; }
    int num_nodes() const { return spec.nx * spec.nmu; }
    double dx() const { return dx_; }
    double dmu() const { return dmu_; }

    /// Flat node index; mu-major so each mu-column is contiguous in x.
    int index(int i, int j) const { return j * spec.nx + i; }
    double x(int i) const { return xs[static_cast<std::size_t>(i)]; }
    double mu(int j) const { return mus[static_cast<std::size_t>(j)]; }
    NodeTag tag(int i, int j) const { return tags[static_cast<std::size_t>(index(i, j))]; }

    /// Nearest column index for a profitability value, clamped to the grid.
    int nearest_column(double mu) const;
    /// Nearest row index for a cash value, clamped to the grid.
    int nearest_row(double x) const;

    double dx_ = 0.0;
    double dmu_ = 0.0;
};

/// Validates the spec against the model domain and builds coordinates and tags.
Grid build(const GridSpec& spec, const ModelParams& model);

}  // namespace divopt

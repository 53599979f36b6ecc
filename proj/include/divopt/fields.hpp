#pragma once

#include <vector>

#include "divopt/grid.hpp"

namespace divopt {

/// Per-node scalar field stored mu-major (column j contiguous in x).
struct Field {
    int nx = 0;
    int nmu = 0;
    std::vector<double> data;

    Field() = default;
    Field(int nx_, int nmu_, double fill = 0.0)
        : nx(nx_), nmu(nmu_), data(static_cast<std::size_t>(nx_) * nmu_, fill) {}
    explicit Field(const Grid& grid, double fill = 0.0) : Field(grid.nx(), grid.nmu(), fill) {}

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(j) * nx + i]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(j) * nx + i]; }
    std::size_t size() const { return data.size(); }

    bool operator==(const Field& other) const = default;
};

using ValueField = Field;

/// Dividend rate per node, values in [0, K]; converged policies are bang-bang.
using PolicyField = Field;

/// Bilinear interpolation of a field at an off-node point (clamped to the box).
double interpolate(const Field& field, const Grid& grid, double x, double mu);

}  // namespace divopt

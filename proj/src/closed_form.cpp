#include "divopt/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace divopt {

DeterministicParams::DeterministicParams(double r_, double k_, double mu_bar_)
    : r(r_), k(k_), mu_bar(mu_bar_) {
    if (!(r > 0.0)) throw std::invalid_argument("deterministic.r: must be > 0");
    if (!(k > 0.0)) throw std::invalid_argument("deterministic.k: must be > 0");
    if (!(mu_bar > 0.0)) throw std::invalid_argument("deterministic.mu_bar: must be > 0");
}

double tau0(const DeterministicParams& p, double mu) {
    if (mu > 0.0) throw std::domain_error("tau0: requires mu <= 0");
    return std::log(p.mu_bar / (p.mu_bar - mu)) / (-p.k);
}

double x_b(const DeterministicParams& p, double mu) {
    if (mu >= 0.0) return 0.0;
    return -p.mu_bar * tau0(p, mu) - mu / p.k;
}

double deterministic_value_at_origin(const DeterministicParams& p) {
    return p.mu_bar / p.r - p.mu_bar / (p.r + p.k);
}

double deterministic_value(const DeterministicParams& p, double x, double mu) {
    if (!(x >= 0.0)) throw std::domain_error("deterministic_value: requires x >= 0");
    if (mu >= 0.0) return x + p.mu_bar / p.r + (mu - p.mu_bar) / (p.r + p.k);
    const double barrier = x_b(p, mu);
    if (x < barrier) return x;
    const double waiting = std::exp(-p.r * tau0(p, mu)) * deterministic_value_at_origin(p);
    return x + std::max(0.0, waiting - barrier);
}

double deterministic_mu_star(const DeterministicParams& p) {
    const double v00 = deterministic_value_at_origin(p);
    auto g = [&](double mu) { return x_b(p, mu) - std::exp(-p.r * tau0(p, mu)) * v00; };

    // g < 0 near zero (x_b -> 0 while the waiting value stays positive) and
    // g -> +infinity as mu -> -infinity; widen the bracket geometrically.
    double hi = -1e-12;
    double lo = -1.0;
    while (g(lo) < 0.0) {
        lo *= 2.0;
        if (lo < -1e6)
            throw std::runtime_error("deterministic_mu_star: no sign change down to mu = -1e6");
    }
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double AuxiliarySolution::value_at(double mu) const {
    if (mus.empty()) throw std::logic_error("auxiliary solution is empty");
    if (mu <= mus.front()) return values.front();
    if (mu >= mus.back()) return values.back();
    const double step = mus[1] - mus[0];
    const auto j = static_cast<std::size_t>((mu - mus.front()) / step);
    const std::size_t jc = std::min(j, mus.size() - 2);
    const double t = (mu - mus[jc]) / (mus[jc + 1] - mus[jc]);
    return (1.0 - t) * values[jc] + t * values[jc + 1];
}

AuxiliarySolution solve_auxiliary(const ModelParams& model, const std::vector<double>& mu_nodes,
                                  double K) {
    const int m = static_cast<int>(mu_nodes.size());
    if (m < 3) throw std::invalid_argument("auxiliary: need at least 3 mu nodes");
    if (!(K > 0.0)) throw std::invalid_argument("auxiliary: K must be > 0");
    const double step = mu_nodes[1] - mu_nodes[0];
    for (int j = 1; j < m; ++j)
        if (std::abs(mu_nodes[j] - mu_nodes[j - 1] - step) > 1e-9 * std::max(1.0, std::abs(step)))
            throw std::invalid_argument("auxiliary: mu nodes must be uniformly spaced");

    // Tridiagonal rows of r v - kappa v' - sigma_tilde^2/2 v'' + ell v = mu,
    // reflecting at both ends; ell in {0, K} penalizes the obstacle v >= 0.
    std::vector<double> lower(m), diag(m), upper(m), rhs(m), v(m, 0.0);
    std::vector<char> stopped(m, 0), prev(m, 0);

    auto assemble_and_solve = [&] {
        for (int j = 0; j < m; ++j) {
            if (j == 0 || j == m - 1) {
                diag[j] = 1.0;
                lower[j] = (j == m - 1) ? -1.0 : 0.0;
                upper[j] = (j == 0) ? -1.0 : 0.0;
                rhs[j] = 0.0;
                continue;
            }
            const double mu = mu_nodes[j];
            const double kap = model.kappa(mu);
            const double st = model.sigma_tilde(mu);
            const double diffusion = 0.5 * st * st / (step * step);
            const double up = std::max(kap, 0.0) / step;
            const double dn = std::max(-kap, 0.0) / step;
            lower[j] = -(dn + diffusion);
            upper[j] = -(up + diffusion);
            diag[j] = model.r + up + dn + 2.0 * diffusion + (stopped[j] ? K : 0.0);
            rhs[j] = mu;
        }
        // Thomas algorithm.
        std::vector<double> c(m), d(m);
        c[0] = upper[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for (int j = 1; j < m; ++j) {
            const double denom = diag[j] - lower[j] * c[j - 1];
            c[j] = upper[j] / denom;
            d[j] = (rhs[j] - lower[j] * d[j - 1]) / denom;
        }
        v[m - 1] = d[m - 1];
        for (int j = m - 2; j >= 0; --j) v[j] = d[j] - c[j] * v[j + 1];
    };

    const int max_iter = 200;
    for (int iter = 0; iter < max_iter; ++iter) {
        assemble_and_solve();
        prev = stopped;
        for (int j = 1; j < m - 1; ++j) {
            // Residual is affine in ell with slope v; ties keep the incumbent.
            if (v[j] < 0.0)
                stopped[j] = 1;
            else if (v[j] > 0.0)
                stopped[j] = 0;
        }
        if (stopped == prev) break;
    }

    AuxiliarySolution out;
    out.mus = mu_nodes;
    out.values.resize(m);
    for (int j = 0; j < m; ++j) out.values[j] = std::max(v[j], 0.0);

    // Stopped block attached to the bottom defines the threshold.
    const double scale = std::max(1.0, std::abs(v[m - 1]));
    if (stopped[1] || v[1] <= 1e-12 * scale) {
        int j_star = 1;
        while (j_star + 1 < m - 1 && (stopped[j_star + 1] || v[j_star + 1] <= 0.0)) ++j_star;
        out.mu_star = mu_nodes[j_star];
    } else {
        out.truncation_warning = out.values[0] > 1e-9 * scale;
    }
    return out;
}

AuxiliarySolution solve_auxiliary_on_grid(const ModelParams& model, const Grid& grid, double K,
                                          double pad) {
    const double dmu = grid.dmu();
    if (K <= 0.0) K = 100.0 / dmu;
    if (pad <= 0.0) pad = 0.75 * (grid.spec.mu_max - grid.spec.mu_min);

    const Interval dom = model.domain();
    int cells_lo = static_cast<int>(std::ceil(pad / dmu));
    while (cells_lo > 0 && grid.spec.mu_min - cells_lo * dmu < dom.lo) --cells_lo;
    int cells_hi = static_cast<int>(std::ceil(pad / dmu));
    while (cells_hi > 0 && grid.spec.mu_max + cells_hi * dmu > dom.hi) --cells_hi;

    std::vector<double> nodes;
    nodes.reserve(grid.nmu() + cells_lo + cells_hi);
    for (int j = -cells_lo; j < grid.nmu() + cells_hi; ++j)
        nodes.push_back(grid.spec.mu_min + j * dmu);
    return solve_auxiliary(model, nodes, K);
}

}  // namespace divopt

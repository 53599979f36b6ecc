#include "divopt/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "divopt/operator.hpp"

namespace divopt {

double default_grad_const(const ModelParams& model, const Grid& grid) {
    return 10.0 * model.r * grid.spec.x_max;
}

bool InvariantReport::all() const {
    return std::all_of(items.begin(), items.end(), [](const Item& i) { return i.pass; });
}

std::string InvariantReport::summary() const {
    std::ostringstream out;
    for (const auto& item : items)
        out << (item.pass ? "  ok   " : "  FAIL ") << item.name
            << (item.detail.empty() ? "" : ": " + item.detail) << '\n';
    return out.str();
}

namespace {

struct Worst {
    double violation = 0.0;
    int i = -1, j = -1;

    void update(double v, int i_, int j_) {
        if (v > violation) {
            violation = v;
            i = i_;
            j = j_;
        }
    }

    InvariantReport::Item item(const std::string& name, const Grid& grid) const {
        if (violation <= 0.0) return {name, true, {}};
        std::ostringstream detail;
        detail << "worst violation " << violation << " at (x=" << grid.x(i) << ", mu=" << grid.mu(j)
               << ")";
        return {name, false, detail.str()};
    }
};

}  // namespace

InvariantReport check_solution_invariants(const ModelParams& model, const Grid& grid,
                                          const ValueField& value, const PolicyField& policy,
                                          double K, const AuxiliarySolution* va,
                                          const InvariantTolerances& tol) {
    const int nx = grid.nx();
    const int nmu = grid.nmu();
    const double dx = grid.dx();
    const double grad_const = tol.grad_const > 0.0 ? tol.grad_const : default_grad_const(model, grid);
    const double eps_k = grad_const / K;
    double v_scale = 1.0;
    for (double v : value.data) v_scale = std::max(v_scale, std::abs(v));

    InvariantReport report;

    Worst nonneg;
    for (int j = 0; j < nmu; ++j)
        for (int i = 0; i < nx; ++i) nonneg.update(-value(i, j) - 1e-9 * v_scale, i, j);
    report.items.push_back(nonneg.item("value_nonnegative", grid));

    Worst ruin0;
    for (int j = 0; j < nmu; ++j) ruin0.update(std::abs(value(0, j)) - 1e-9 * v_scale, 0, j);
    report.items.push_back(ruin0.item("value_zero_at_ruin", grid));

    Worst mono_x;
    for (int j = 0; j < nmu; ++j)
        for (int i = 0; i + 1 < nx; ++i)
            mono_x.update(value(i, j) - value(i + 1, j) - tol.monotone * v_scale, i, j);
    report.items.push_back(mono_x.item("value_nondecreasing_in_x", grid));

    Worst mono_mu;
    for (int j = 0; j + 1 < nmu; ++j)
        for (int i = 0; i < nx; ++i)
            mono_mu.update(value(i, j) - value(i, j + 1) - tol.monotone * v_scale, i, j);
    report.items.push_back(mono_mu.item("value_nondecreasing_in_mu", grid));

    Worst grad;
    for (int j = 0; j < nmu; ++j)
        for (int i = 1; i <= nx - 2; ++i) {
            const double fwd = (value(i + 1, j) - value(i, j)) / dx;
            grad.update((1.0 - eps_k) - fwd, i, j);
        }
    report.items.push_back(grad.item("gradient_at_least_one", grid));

    Worst liq;
    for (int j = 0; j < nmu; ++j)
        for (int i = 0; i < nx; ++i) liq.update(grid.x(i) - eps_k - value(i, j), i, j);
    report.items.push_back(liq.item("liquidation_lower_bound", grid));

    if (va) {
        Worst upper;
        for (int j = 0; j < nmu; ++j) {
            const double cap = va->value_at(grid.mu(j)) + tol.upper_bound_tol;
            for (int i = 0; i < nx; ++i) upper.update(value(i, j) - grid.x(i) - cap, i, j);
        }
        report.items.push_back(upper.item("real_option_upper_bound", grid));
    }

    {
        const DiscreteOperator op = assemble(model, grid, policy, K);
        const RowCheck rows = check_monotone_rows(op, grid, model);
        InvariantReport::Item item{"monotone_operator_rows", rows.ok(), {}};
        if (!rows.ok())
            item.detail = std::to_string(rows.violations) + " rows violate monotonicity";
        report.items.push_back(std::move(item));
    }

    return report;
}

}  // namespace divopt

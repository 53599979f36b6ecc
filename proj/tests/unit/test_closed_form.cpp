#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "divopt/closed_form.hpp"
#include "helpers.hpp"

using namespace divopt;

namespace {
const DeterministicParams kDefaults(0.05, 0.5, 0.15);
}

TEST_SUITE_BEGIN("closed_form");

TEST_CASE("tau0") {
    CHECK(tau0(kDefaults, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    // ln(0.5) / (-0.5), evaluated at high precision.
    CHECK(tau0(kDefaults, -0.15) == doctest::Approx(1.3862943611198906).epsilon(1e-12));
    CHECK_THROWS_AS(tau0(kDefaults, 0.01), std::domain_error);

    // Nonincreasing in mu and divergent toward -infinity.
    double prev = tau0(kDefaults, 0.0);
    for (double mu = -0.1; mu > -50.0; mu *= 1.7) {
        const double t = tau0(kDefaults, mu);
        CHECK(t >= prev);
        prev = t;
    }
    CHECK(tau0(kDefaults, -1e9) > 40.0);
}

TEST_CASE("x_b") {
    CHECK(x_b(kDefaults, 0.0) == 0.0);
    CHECK(x_b(kDefaults, 0.7) == 0.0);
    CHECK(x_b(kDefaults, -0.15) == doctest::Approx(0.0920558458320164).epsilon(1e-12));
    CHECK(x_b(kDefaults, -1e-9) == doctest::Approx(0.0).epsilon(1e-12));

    double prev = x_b(kDefaults, 0.1);
    for (double mu = 0.0; mu > -3.0; mu -= 0.05) {
        const double xb = x_b(kDefaults, mu);
        CHECK(xb >= prev - 1e-14);
        prev = xb;
    }
}

TEST_CASE("deterministic value") {
    CHECK(deterministic_value_at_origin(kDefaults) ==
          doctest::Approx(2.7272727272727273).epsilon(1e-14));
    CHECK(deterministic_value(kDefaults, 1.0, 0.15) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(deterministic_value(kDefaults, 0.0, 0.0) ==
          doctest::Approx(2.7272727272727273).epsilon(1e-14));
    // Below the survival barrier the firm is worth its cash.
    CHECK(deterministic_value(kDefaults, 0.05, -0.15) == 0.05);
    CHECK(x_b(kDefaults, -0.15) > 0.05);
}

TEST_CASE("deterministic value: seam behavior") {
    const double mu_star = deterministic_mu_star(kDefaults);
    const double v00 = deterministic_value_at_origin(kDefaults);

    // Continuous in mu across mu = 0 and mu = mu_star at fixed x.
    for (double x : {0.0, 0.5, 2.0}) {
        CHECK(std::abs(deterministic_value(kDefaults, x, 1e-12) -
                       deterministic_value(kDefaults, x, -1e-12)) < 1e-8);
        CHECK(std::abs(deterministic_value(kDefaults, x, mu_star + 1e-10) -
                       deterministic_value(kDefaults, x, mu_star - 1e-10)) < 1e-8);
    }

    // Below the liquidation threshold the x_b seam is flat (both sides pay x).
    for (double mu : {mu_star - 0.01, mu_star - 0.3}) {
        const double xb = x_b(kDefaults, mu);
        CHECK(std::abs(deterministic_value(kDefaults, xb * (1.0 + 1e-10), mu) -
                       deterministic_value(kDefaults, xb * (1.0 - 1e-10), mu)) < 1e-8);
    }

    // Between mu_star and zero the value genuinely jumps at x_b: barely
    // surviving to profitability beats liquidating by the waiting premium.
    // (The sigma = 0 problem is only upper semicontinuous there.)
    for (double mu : {-0.1, -0.5, -1.0, mu_star + 0.05}) {
        const double xb = x_b(kDefaults, mu);
        const double jump = deterministic_value(kDefaults, xb * (1.0 + 1e-12), mu) -
                            deterministic_value(kDefaults, xb * (1.0 - 1e-12), mu);
        const double waiting = std::exp(-kDefaults.r * tau0(kDefaults, mu)) * v00;
        CHECK(jump == doctest::Approx(waiting - xb).epsilon(1e-6));
        CHECK(jump > 0.0);
    }
}

TEST_CASE("deterministic liquidation threshold") {
    const double v00 = deterministic_value_at_origin(kDefaults);
    auto g = [&](double mu) {
        return x_b(kDefaults, mu) - std::exp(-kDefaults.r * tau0(kDefaults, mu)) * v00;
    };
    CHECK(g(-1.4) < 0.0);
    CHECK(g(-1.45) > 0.0);

    const double mu_star = deterministic_mu_star(kDefaults);
    CHECK(mu_star == doctest::Approx(-1.4307634468836830).epsilon(1e-8));
    CHECK(mu_star < 0.0);

    // Liquidation value below the threshold.
    for (double mu : {mu_star - 0.01, mu_star - 0.5, mu_star - 2.0})
        for (double x : {0.0, 1.0, 4.0}) CHECK(deterministic_value(kDefaults, x, mu) == x);

    // V - x is nonnegative, nondecreasing in mu, and zero below the threshold.
    double prev = 0.0;
    for (double mu = mu_star - 0.2; mu < 1.0; mu += 0.01) {
        const double premium = deterministic_value(kDefaults, 1.0, mu) - 1.0;
        CHECK(premium >= prev - 1e-12);
        CHECK(premium >= 0.0);
        prev = premium;
    }
}

TEST_CASE("auxiliary solve approaches the deterministic real option as sigma_tilde vanishes") {
    const ModelParams model = test::ou_default_model(1e-3);
    std::vector<double> nodes;
    for (int j = 0; j <= 1200; ++j) nodes.push_back(-3.0 + j * 0.005);
    const AuxiliarySolution sol = solve_auxiliary(model, nodes, 100.0 / 0.005);

    // Without noise the option value is max(0, perpetual cash-flow value) and
    // the stopping threshold solves mu/(r+k) + mu_bar k/(r(r+k)) = 0.
    auto no_stop = [](double mu) { return 0.15 / 0.05 + (mu - 0.15) / 0.55; };
    for (double mu : {-2.0, -1.0, 0.0, 0.15, 0.5, 1.5})
        CHECK(sol.value_at(mu) ==
              doctest::Approx(std::max(0.0, no_stop(mu))).epsilon(2e-2).scale(1.0));
    REQUIRE(sol.mu_star.has_value());
    CHECK(*sol.mu_star == doctest::Approx(-1.5).epsilon(0.01));

    // The ruin-free threshold sits below the liquidation threshold of the
    // full problem (liquidating is optimal no later than the option says).
    CHECK(*sol.mu_star < deterministic_mu_star(kDefaults));
}

TEST_CASE("auxiliary solve on the default model") {
    const ModelParams model = test::ou_default_model();
    const Grid grid = test::small_grid(model, 41, 161);
    const AuxiliarySolution sol = solve_auxiliary_on_grid(model, grid);

    REQUIRE(sol.mu_star.has_value());
    CHECK(*sol.mu_star < 0.0);
    CHECK_FALSE(sol.truncation_warning);

    // Nonnegative, nondecreasing, zero at the threshold with smooth fit.
    for (double v : sol.values) CHECK(v >= 0.0);
    for (std::size_t j = 1; j < sol.values.size(); ++j)
        CHECK(sol.values[j] >= sol.values[j - 1] - 1e-9);
    CHECK(sol.value_at(*sol.mu_star) == 0.0);
    const double dmu = sol.mus[1] - sol.mus[0];
    const double one_sided = (sol.value_at(*sol.mu_star + dmu) - 0.0) / dmu;
    CHECK(one_sided >= 0.0);
    CHECK(one_sided <= 10.0 * dmu / kDefaults.r);

    // Growth bound: V_a(mu) <= mu/r + C on mu < 0 with C = -mu_min/r.
    const double c = -sol.mus.front() / model.r;
    for (std::size_t j = 0; j < sol.mus.size(); ++j) {
        if (sol.mus[j] >= 0.0) break;
        CHECK(sol.values[j] <= sol.mus[j] / model.r + c + 1e-9);
    }
}

TEST_CASE("auxiliary truncation warning when the threshold is outside") {
    const ModelParams model = test::ou_default_model();
    std::vector<double> nodes;
    for (int j = 0; j <= 200; ++j) nodes.push_back(0.5 + j * 0.01);
    const AuxiliarySolution sol = solve_auxiliary(model, nodes, 1e4);
    CHECK_FALSE(sol.mu_star.has_value());
    CHECK(sol.truncation_warning);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(DeterministicParams(0.05, -0.5, 0.15), std::invalid_argument);
    CHECK_THROWS_AS(DeterministicParams(0.05, 0.5, -0.15), std::invalid_argument);
    CHECK_THROWS_AS(deterministic_value(kDefaults, -1.0, 0.0), std::domain_error);
}

TEST_SUITE_END();

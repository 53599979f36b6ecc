#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "divopt/model.hpp"
#include "helpers.hpp"

using namespace divopt;

TEST_SUITE_BEGIN("model");

TEST_CASE("ou drift values") {
    const ModelParams m = test::ou_default_model();
    CHECK(m.kappa(0.15) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(m.kappa(0.0) == doctest::Approx(0.075));
    CHECK(m.sigma_tilde(-1.0) == 0.3);

    // Deterministic evaluation: repeated calls are bit-identical.
    CHECK(m.kappa(0.1234) == m.kappa(0.1234));

    // Antisymmetry about the mean.
    for (double d : {0.05, 0.3, 1.7}) CHECK(m.kappa(0.15 + d) == doctest::Approx(-m.kappa(0.15 - d)));
}

TEST_CASE("cir drift vanishes at the boundary") {
    const ModelParams m(0.05, 0.1, 0.0, DriftSpec::cir(0.5, 0.15, 0.3, -1.0));
    CHECK(m.kappa(-1.0) == doctest::Approx(0.575));
    CHECK(m.sigma_tilde(-1.0) == 0.0);
    CHECK(m.sigma_tilde(0.0) == doctest::Approx(0.3 * std::sqrt(1.0)));
    CHECK_THROWS_AS(m.kappa(-1.5), std::domain_error);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ModelParams(0.0, 0.1, 0.0, DriftSpec::ou(0.5, 0.15, 0.3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.05, 0.0, 0.0, DriftSpec::ou(0.5, 0.15, 0.3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.05, 0.1, 1.5, DriftSpec::ou(0.5, 0.15, 0.3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(DriftSpec::ou(-0.5, 0.15, 0.3), std::invalid_argument);
}

TEST_CASE("validate_assumptions passes for the ou defaults") {
    for (double st : {0.1, 0.3}) {
        const ModelParams m = test::ou_default_model(st);
        const ValidationReport rep = validate_assumptions(m, Interval{-3.0, 3.0}, 100);
        CHECK(rep.all_passed());
    }
}

TEST_CASE("validate_assumptions fails for a constant positive drift") {
    const ModelParams m(0.05, 0.1, 0.0,
                        DriftSpec::custom([](double) { return 1.0; },
                                          [](double) { return 0.2; }, Interval{-10.0, 10.0}));
    const ValidationReport rep = validate_assumptions(m, Interval{-3.0, 3.0}, 100);
    CHECK_FALSE(rep.all_passed());
    const auto* check = rep.find("mean_reversion");
    REQUIRE(check != nullptr);
    CHECK(check->status == AssumptionCheck::Status::Fail);
    REQUIRE_FALSE(check->offending_mus.empty());
    CHECK(check->offending_mus.front() == doctest::Approx(3.0));
    // Feller-type boundary conditions cannot be sampled for custom drifts.
    const auto* boundary = rep.find("boundary_condition");
    REQUIRE(boundary != nullptr);
    CHECK(boundary->status == AssumptionCheck::Status::NotChecked);
}

TEST_CASE("validate_assumptions flags only the degenerate cir boundary node") {
    const ModelParams m(0.05, 0.1, 0.0, DriftSpec::cir(0.5, 0.15, 0.3, 0.0));
    const ValidationReport rep = validate_assumptions(m, Interval{0.0, 3.0}, 100);
    CHECK(rep.all_passed());
    const auto* positivity = rep.find("sigma_positive");
    REQUIRE(positivity != nullptr);
    CHECK(positivity->status == AssumptionCheck::Status::Pass);
    REQUIRE(positivity->offending_mus.size() == 1);
    CHECK(positivity->offending_mus.front() == doctest::Approx(0.0));
}

TEST_CASE("validate_assumptions rejects bad sampling requests") {
    const ModelParams m = test::ou_default_model();
    CHECK_THROWS_AS(validate_assumptions(m, Interval{-3.0, 3.0}, 1), std::invalid_argument);
    const ModelParams cir(0.05, 0.1, 0.0, DriftSpec::cir(0.5, 0.15, 0.3, 0.0));
    CHECK_THROWS_AS(validate_assumptions(cir, Interval{-1.0, 3.0}, 10), std::invalid_argument);
}

TEST_SUITE_END();

#include <doctest.h>

#include <stdexcept>

#include <map>

#include "divopt/grid.hpp"
#include "helpers.hpp"

using namespace divopt;

TEST_SUITE_BEGIN("grid");

TEST_CASE("tiny grid tag counts") {
    const ModelParams m = test::ou_default_model();
    GridSpec spec{1.0, -1.0, 1.0, 3, 3};
    const Grid g = build(spec, m);
    REQUIRE(g.num_nodes() == 9);

    std::map<NodeTag, int> counts;
    for (NodeTag t : g.tags) ++counts[t];
    CHECK(counts[NodeTag::Interior] == 1);
    CHECK(counts[NodeTag::Corner] == 4);
    CHECK(counts[NodeTag::XZero] == 1);
    CHECK(counts[NodeTag::XMax] == 1);
    CHECK(counts[NodeTag::MuMin] == 1);
    CHECK(counts[NodeTag::MuMax] == 1);

    int total = 0;
    for (auto [tag, n] : counts) total += n;
    CHECK(total == g.num_nodes());
}

TEST_CASE("node counts at the reference resolutions") {
    const ModelParams m = test::ou_default_model();
    CHECK(build(GridSpec{5.0, -2.0, 2.0, 1000, 1000}, m).num_nodes() == 1000000);
    CHECK(build(GridSpec{5.0, -2.0, 2.0, 300, 300}, m).num_nodes() == 90000);
}

TEST_CASE("coordinate reconstruction is exact") {
    const ModelParams m = test::ou_default_model();
    const Grid g = build(GridSpec{5.0, -2.0, 2.0, 157, 91}, m);
    for (int i = 0; i < g.nx(); ++i) CHECK(g.x(i) == i * g.dx());
    for (int j = 0; j < g.nmu(); ++j) CHECK(g.mu(j) == -2.0 + j * g.dmu());
}

TEST_CASE("nested refinement keeps coarse nodes bit-identical") {
    const ModelParams m = test::ou_default_model();
    const Grid coarse = build(GridSpec{5.0, -2.0, 2.0, 65, 33}, m);
    const Grid fine = build(GridSpec{5.0, -2.0, 2.0, 129, 65}, m);
    for (int i = 0; i < coarse.nx(); ++i) CHECK(fine.x(2 * i) == coarse.x(i));
    for (int j = 0; j < coarse.nmu(); ++j) CHECK(fine.mu(2 * j) == coarse.mu(j));
}

TEST_CASE("defaults cover the plotted window") {
    const ModelParams m = test::ou_default_model();
    const GridSpec spec = GridSpec::defaults_for(m);
    CHECK(spec.x_max == 5.0);
    CHECK(spec.mu_min == -2.0);
    CHECK(spec.mu_max == 2.0);
    CHECK(spec.mu_min < -1.1);
    CHECK(spec.mu_max > 1.2);
    CHECK(spec.x_max > 3.0);

    // Wider sigma_tilde widens the window beyond the clip.
    const ModelParams wide = test::ou_default_model(0.8);
    const GridSpec wide_spec = GridSpec::defaults_for(wide);
    CHECK(wide_spec.mu_max > 2.0);
}

TEST_CASE("build rejections") {
    const ModelParams m = test::ou_default_model();
    CHECK_THROWS_AS(build(GridSpec{5.0, -2.0, 2.0, 2, 10}, m), std::invalid_argument);
    CHECK_THROWS_AS(build(GridSpec{5.0, -2.0, 2.0, 10, 2}, m), std::invalid_argument);
    CHECK_THROWS_AS(build(GridSpec{5.0, 2.0, -2.0, 10, 10}, m), std::invalid_argument);

    const ModelParams cir(0.05, 0.1, 0.0, DriftSpec::cir(0.5, 0.15, 0.3, -1.0));
    CHECK_THROWS_AS(build(GridSpec{5.0, -1.5, 2.0, 10, 10}, cir), std::invalid_argument);
    // The degenerate boundary needs the explicit flag.
    CHECK_THROWS_AS(build(GridSpec{5.0, -1.0, 2.0, 10, 10}, cir), std::invalid_argument);
    GridSpec flagged{5.0, -1.0, 2.0, 10, 10};
    flagged.allow_degenerate_mu_boundary = true;
    CHECK_NOTHROW(build(flagged, cir));
    // One cell above the boundary works without the flag.
    const GridSpec above = GridSpec::defaults_for(cir);
    CHECK(above.mu_min > -1.0);
    CHECK_NOTHROW(build(above, cir));
}

TEST_SUITE_END();

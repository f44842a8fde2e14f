#include <catch2/catch_amalgamated.hpp>
#include <numbers>

#include "slkrein/problem.hpp"

using namespace slkrein;

TEST_CASE("constant coefficients build the free problem") {
    auto prob = build_problem(0.0, 1.0, 1.0, 0.0, 1.0);
    CHECK(prob.a == 0.0);
    CHECK(prob.b == 1.0);
    CHECK(prob.p(0.3) == 1.0);
    CHECK(prob.q(0.7) == 0.0);
    CHECK(prob.r(0.99) == 1.0);
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(build_problem(0.0, 1.0, -1.0, 0.0, 1.0), NonPositiveCoefficient);
    CHECK_THROWS_AS(build_problem(1.0, 0.0, 1.0, 0.0, 1.0), BadInterval);
    CHECK_THROWS_AS(build_problem(0.0, std::numeric_limits<double>::infinity(), 1.0, 0.0, 1.0),
                    BadInterval);
    CHECK_THROWS_AS(
        build_problem(0.0, 1.0, Coefficient::sampled({0.0, 0.5, 0.9}, {1.0, 1.0, 1.0}), 0.0, 1.0),
        BadGrid);
    CHECK_THROWS_AS(
        build_problem(0.0, 1.0, Coefficient::piecewise({1.5}, {1.0, 2.0}), 0.0, 1.0), BadGrid);
    CHECK_THROWS_AS(
        build_problem(0.0, 1.0, Coefficient::piecewise({0.5}, {1.0, -2.0}), 0.0, 1.0),
        NonPositiveCoefficient);
}

TEST_CASE("presets") {
    auto fu = preset("free-unit");
    CHECK(fu.b == 1.0);
    auto fp = preset("free-pi");
    CHECK(fp.b == Catch::Approx(std::numbers::pi));
    auto sq = preset("step-q");
    CHECK(sq.q(0.25) == 0.0);
    CHECK(sq.q(0.75) == 10.0);
    CHECK(sq.q(0.5) == 10.0);  // half-open cells [x_i, x_{i+1})
    auto sp = preset("step-p");
    CHECK(sp.p(0.25) == 1.0);
    CHECK(sp.p(0.75) == 2.0);
    CHECK_THROWS_AS(preset("cubic"), UnknownPreset);
}

TEST_CASE("presets are deterministic and evaluable on a dense grid") {
    for (const char* name : {"free-unit", "free-pi", "step-q", "step-p"}) {
        auto p1 = preset(name);
        auto p2 = preset(name);
        for (int i = 0; i <= 1000; ++i) {
            double x = p1.a + (p1.b - p1.a) * i / 1000.0;
            CHECK(p1.p(x) == p2.p(x));
            CHECK(p1.q(x) == p2.q(x));
            CHECK(p1.r(x) == p2.r(x));
            CHECK(p1.p(x) > 0.0);
            CHECK(p1.r(x) > 0.0);
        }
    }
}

TEST_CASE("sampled coefficient interpolates linearly") {
    auto c = Coefficient::sampled({0.0, 0.5, 1.0}, {1.0, 2.0, 4.0});
    CHECK(c(0.25) == Catch::Approx(1.5));
    CHECK(c(0.75) == Catch::Approx(3.0));
    CHECK(c(0.0) == 1.0);
    CHECK(c(1.0) == 4.0);
    auto prob = build_problem(0.0, 1.0, c, 0.0, 1.0);
    auto bounds = prob.segment_bounds();
    CHECK(bounds.size() == 3);
}

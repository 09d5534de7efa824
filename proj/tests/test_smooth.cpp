#include <doctest.h>

#include <cmath>

#include "psgzt/atlas.hpp"
#include "psgzt/error.hpp"
#include "psgzt/smooth.hpp"

using namespace psgzt;

TEST_CASE("parameter checks") {
    CHECK_THROWS_AS((SmoothParams{0.5, 1.0, 1.0}.validate()), Error);
    CHECK_THROWS_AS((SmoothParams{300, 1.0, 1.0}.validate()), Error);
    const auto flat = [](double) { return 1.0; };
    CHECK_THROWS_AS(integrate_smooth({10, 1.0, 0.01}, flat, 1.0, 1e-3), Error);
    CHECK(default_smooth_dt(0.8) == doctest::Approx(1e-3));
    CHECK(default_smooth_dt(0.01) <= 0.01 / 20);
}

TEST_CASE("integrator is exact while the delayed term saturates") {
    // While h(t - tau) stays far from 0, tanh is -1 to rounding and h' = 1 + c cos(2 pi t).
    const SmoothParams p{50, 0.5, 0.5};
    const auto hist = [](double) { return -5.0; };
    const double dt = 1e-3;
    const auto tr = integrate_smooth(p, hist, 0.5, dt);
    for (std::size_t i = 0; i < tr.h.size(); i += 10) {
        const double t = dt * static_cast<double>(i);
        CHECK(std::abs(tr.h[i] - (-5.0 + t + 0.5 * std::sin(2 * M_PI * t) / (2 * M_PI))) < 1e-12);
    }
}

TEST_CASE("halving dt barely moves the trajectory") {
    const SmoothParams p{11, 2.0, 0.8};
    const auto hist = [](double t) { return 0.5 + t; };
    const auto a = integrate_smooth(p, hist, 10.0, 1e-3);
    const auto b = integrate_smooth(p, hist, 10.0, 5e-4);
    double gap = 0;
    for (std::size_t i = 0; i < a.h.size(); ++i) gap = std::max(gap, std::abs(a.h[i] - b.h[2 * i]));
    CHECK(gap < 1e-6);
}

TEST_CASE("period-1 classification above and below the torus curve") {
    CHECK(classify_period1({33, 4.0, 0.8}).stable);
    CHECK(classify_period1({33, 4.0, 0.8}).drift < 1e-8);
    CHECK_FALSE(classify_period1({33, 1.0, 0.8}).stable);
}

TEST_CASE("bisection bracket must straddle") {
    try {
        smooth_boundary_bisect(33, 0.8, 4.0, 5.0);
        FAIL("expected SameClassAtBracket");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SameClassAtBracket);
    }
}

TEST_CASE("smooth boundary approaches the closed form") {
    const double cT = torus_c(0, true, 0.8);
    double prev = 1e9;
    for (double kappa : {11.0, 33.0, 100.0}) {
        const double c = smooth_boundary_bisect(kappa, 0.8, 1.5, 5.0).c;
        const double gap = std::abs(c - cT);
        CHECK(gap < prev);
        prev = gap;
    }
    const double fold = smooth_boundary_bisect(33, 0.36, 0.2, 2.0).c;
    CHECK(fold == doctest::Approx(u_of(0.36)).epsilon(0.15));
}

TEST_CASE("boundary estimate is insensitive to dt") {
    ClassifyOptions fine;
    fine.dt = 5e-4;
    const double a = smooth_boundary_bisect(33, 0.8, 1.5, 5.0).c;
    const double b = smooth_boundary_bisect(33, 0.8, 1.5, 5.0, fine).c;
    CHECK(std::abs(a - b) < 1e-3 + 1e-12);
}

TEST_CASE("rotation numbers just below the boundary") {
    const double b08 = smooth_boundary_bisect(33, 0.8, 1.5, 5.0).c;
    const auto r1 = smooth_rotation_estimate({33, b08 - 0.05, 0.8});
    CHECK(std::abs(r1.rho - 1.0 / 3) < 0.02);
    const double b13 = smooth_boundary_bisect(33, 1.3, 1.5, 5.0).c;
    const auto r2 = smooth_rotation_estimate({33, b13 - 0.05, 1.3});
    CHECK(std::abs(r2.rho - 0.2) < 0.02);
    CHECK(r2.stderr_ < 0.01);
}

TEST_CASE("deep in the stable region there is nothing to rotate") {
    CHECK_THROWS_AS(smooth_rotation_estimate({33, 6.0, 0.8}), Error);
}

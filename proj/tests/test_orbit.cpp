#include <doctest.h>

#include <cmath>
#include <random>

#include "psgzt/error.hpp"
#include "psgzt/ivp.hpp"
#include "psgzt/orbit.hpp"

using namespace psgzt;

namespace {

// Centered difference of the profile against the right-hand side, away from kinks.
double dde_residual(const OrbitProfile& o, int samples) {
    const double tau = o.params.tau, c = o.params.c, eps = 1e-6;
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = o.alpha() + (i + 0.37) / samples;
        const double d = o.eval(t - tau);
        if (std::abs(d) < 1e-4) continue;
        bool near_kink = false;
        for (const auto& p : o.pieces)
            near_kink |= std::abs(std::remainder(t - p.t_start, 1.0)) < 1e-4;
        if (near_kink) continue;
        const double lhs = (o.eval(t + eps) - o.eval(t - eps)) / (2 * eps);
        const double rhs = -(d > 0 ? 1.0 : -1.0) + c * std::cos(2 * M_PI * t);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace

TEST_CASE("orbit solves the delay equation") {
    for (auto [tau, c] : {std::pair{0.8, 2.75}, {0.36, 0.9}, {1.3, 3.0}, {1.75, 6.0}, {2.2, 4.0}, {0.1, 2.0}}) {
        const OrbitProfile o = build_orbit({c, tau}, Branch::Low);
        REQUIRE(o.validity.valid);
        CHECK(std::abs(o.eval(o.alpha())) < 1e-12);
        CHECK(dde_residual(o, 400) < 1e-6);
        CHECK(o.symmetry_residual() < 1e-10);
        CHECK(o.positivity.min_h >= -1e-10);
        for (double t = 0; t < 1; t += 0.013) CHECK(std::abs(o.eval(t + 1.0) - o.eval(t)) < 1e-12);
    }
}

TEST_CASE("orbit history fed to the exact solver") {
    const OrbitProfile o = build_orbit({2.75, 0.8}, Branch::Low);
    const auto tr = solve_exact(o.history(), o.params, o.alpha() + 3.0);
    for (double t = o.alpha(); t < o.alpha() + 3.0; t += 0.003) CHECK(std::abs(tr.eval(t) - o.eval(t)) < 1e-9);
}

TEST_CASE("boundary functions") {
    const double th = theta_hat();
    CHECK(th == doctest::Approx(0.4695).epsilon(2e-3));
    // theta_hat is where W_- vanishes at c^2 = u^2, so w_-^2 meets u^2 there
    CHECK(w_minus_sq(th) == doctest::Approx(std::pow(u_of(th), 2)).epsilon(1e-8));
    CHECK(w_plus_sq(th) == doctest::Approx(std::pow(u_of(th), 2)).epsilon(1e-8));
    CHECK(w_minus_sq(0.5) == doctest::Approx(M_PI * M_PI / 4 + 1).epsilon(1e-8));
    CHECK(w_plus_sq(0.25) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(W_minus(0.48, std::sqrt(w_minus_sq(0.48))) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(w_minus_sq(0.3), Error);
    CHECK_THROWS_AS(w_plus_sq(0.48), Error);
}

TEST_CASE("subregion spot checks") {
    CHECK(classify_subregion(0.48, 1.55) == Subregion::II);
    CHECK(classify_subregion(0.48, 1.45) == Subregion::I);
    CHECK(classify_subregion(0.40, 1.30) == Subregion::Plain);
    CHECK(classify_subregion(0.30, 2.0) == Subregion::Plain);
    CHECK(build_orbit({1.55, 0.48}, Branch::Low).validity.valid);
    const OrbitProfile bad = build_orbit({1.45, 0.48}, Branch::Low);
    CHECK_FALSE(bad.validity.valid);
    CHECK(bad.positivity.min_h < -1e-3);
    CHECK(classify_any(0.8, 1.0) == Subregion::III);
    CHECK(classify_any(0.8, 5.0) == Subregion::Plain);
}

TEST_CASE("region verdict bindings") {
    auto v = region_verdict(0.5, 2.0);
    CHECK(v.binding == Binding::HalfIntegerClause);
    CHECK(v.in_R);
    CHECK_FALSE(region_R(0.0, 1.8).in_R);
    CHECK(region_R(0.25, 1e-3).in_R);
    v = region_S(0.8, 3.0);
    CHECK_FALSE(v.in_S);
    CHECK(v.binding == Binding::OutsideDomain);
    CHECK(std::isinf(v.margin));
    CHECK(region_S(0.36, 0.695).in_S);
    CHECK_FALSE(region_S(0.36, 0.6).in_S);
}

TEST_CASE("fold: LOW and HIGH coincide at c = u") {
    const double c = u_of(0.36);
    const OrbitProfile lo = build_orbit({c, 0.36}, Branch::Low);
    const OrbitProfile hi = build_orbit({c, 0.36}, Branch::High);
    for (double t = 0; t < 1; t += 0.001) CHECK(std::abs(lo.eval(t) - hi.eval(t)) < 1e-10);
    const OrbitProfile lo2 = build_orbit({0.695, 0.36}, Branch::Low);
    const OrbitProfile hi2 = build_orbit({0.695, 0.36}, Branch::High);
    CHECK(lo2.validity.valid);
    CHECK(hi2.validity.valid);
    double gap = 0;
    for (double t = 0; t < 1; t += 0.001) gap = std::max(gap, std::abs(lo2.eval(t) - hi2.eval(t)));
    CHECK(gap > 1e-3);
}

TEST_CASE("random valid points: definition matches positivity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> th(0.0, 1.0), cc(0.0, 4.0);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        const double t = th(rng), c = cc(rng);
        if (std::abs(t - 0.5) < 1e-3 || t < 1e-3 || t > 1 - 1e-3) continue;
        const RegionVerdict r = region_R(t, c);
        if (std::abs(r.margin) < 1e-6) continue;
        ++checked;
        try {
            const OrbitProfile o = build_orbit({c, 1.0 + t}, Branch::Low);
            CHECK(r.in_R == o.positivity.positive);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InsufficientForcing);
            CHECK_FALSE(r.in_R);
        }
    }
    CHECK(checked > 1500);
}

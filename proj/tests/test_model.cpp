#include <doctest.h>

#include <cmath>

#include "psgzt/error.hpp"
#include "psgzt/model.hpp"

using namespace psgzt;

TEST_CASE("delay split") {
    auto d = delay_decomp(1.75);
    CHECK(d.k == 1);
    CHECK(d.theta == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(d.half == HalfBranch::Upper);
    CHECK_FALSE(d.boundary);

    d = delay_decomp(2.0 - 1e-10);
    CHECK(d.k == 2);
    CHECK(d.theta == 0.0);
    CHECK(d.half == HalfBranch::Zero);
    CHECK(d.boundary);

    d = delay_decomp(0.5 + 5e-10);
    CHECK(d.half == HalfBranch::Half);
    CHECK(d.boundary);
    CHECK(delay_decomp(0.36).half == HalfBranch::Lower);
}

TEST_CASE("half-integer detection and snapping") {
    CHECK(is_half_integer(1.5));
    CHECK(is_half_integer(2.0 + 1e-10));
    CHECK_FALSE(is_half_integer(1.5 + 1e-6));
    CHECK(snap_theta(0.25 + 1e-10) == 0.25);
    CHECK(snap_theta(0.75 - 1e-10) == 0.75);
    CHECK(snap_theta(1.0 - 1e-10) == 0.0);
    CHECK(snap_theta(0.3) == 0.3);
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(validate(ModelParams{-1.0, 1.0}), Error);
    CHECK_THROWS_AS(validate(ModelParams{1.0, 0.0}), Error);
    CHECK_THROWS_AS(validate(ModelParams{std::nan(""), 1.0}), Error);
    try {
        validate(ModelParams{1.0, -2.0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
        CHECK(is_domain_error(e.code()));
    }
    CHECK_FALSE(is_domain_error(ErrorCode::ConvergenceFailure));
}

TEST_CASE("phase functions") {
    CHECK(u_of(0.36) == doctest::Approx(0.22 * kPi).epsilon(1e-14));
    CHECK(u_of(0.25) == 0.0);
    CHECK(u_of(0.0) == doctest::Approx(-kPi / 2));
    CHECK(v_of(0.75) == 0.0);
    CHECK(v_of(1.0) == doctest::Approx(-kPi / 2));
    CHECK(phase_rhs(0.1) == doctest::Approx(-kPi * 0.3));
    CHECK(phase_rhs(0.9) == doctest::Approx(-kPi * 0.3));
}

TEST_CASE("phase solution satisfies c sin(2 pi alpha) = w") {
    for (double tau : {0.3, 0.36, 0.45, 0.6, 0.8, 1.2, 1.9, 2.7}) {
        const double w = phase_rhs(delay_decomp(tau).theta);
        for (double c : {std::abs(w) + 0.01, std::abs(w) + 0.5, 3.0, 10.0}) {
            for (Branch b : {Branch::Low, Branch::High}) {
                if (b == Branch::High && delay_decomp(tau).theta > 0.5) {
                    CHECK_THROWS_AS(solve_phase({c, tau}, b), Error);
                    continue;
                }
                const PhaseSolution s = solve_phase({c, tau}, b);
                CHECK(c * std::sin(kTwoPi * s.alpha) == doctest::Approx(w).epsilon(1e-12));
                CHECK(std::cos(kTwoPi * s.alpha) * (b == Branch::Low ? 1.0 : -1.0) >= -1e-12);
                CHECK(s.alpha > -0.5);
                CHECK(s.alpha <= 0.5);
                const double delayed = s.theta < 0.5 ? -1.0 : 1.0;
                CHECK(s.hprime_alpha == doctest::Approx(-delayed + c * std::cos(kTwoPi * s.alpha)));
            }
        }
    }
}

TEST_CASE("forcing below the phase threshold") {
    try {
        solve_phase({0.5, 0.36}, Branch::Low);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientForcing);
    }
}

TEST_CASE("fold point: LOW and HIGH coincide") {
    const double c = u_of(0.36);
    const auto lo = solve_phase({c, 0.36}, Branch::Low);
    const auto hi = solve_phase({c, 0.36}, Branch::High);
    CHECK(lo.fold);
    CHECK(hi.fold);
    CHECK(lo.alpha == doctest::Approx(hi.alpha).epsilon(1e-12));
    CHECK(lo.alpha == doctest::Approx(0.25));
}

TEST_CASE("autonomous limit picks alpha on the lattice") {
    const auto s = solve_phase({0.0, 1.25}, Branch::Low);
    CHECK(s.alpha == 0.0);
    CHECK(s.fold);
    CHECK_THROWS_AS(solve_phase({0.0, 1.0}, Branch::Low), Error);
}

TEST_CASE("reduced trig") {
    CHECK(std::abs(sin2pi(1e6 + 0.25) - 1.0) < 1e-12);
    CHECK(std::abs(cos2pi(1e6 + 0.5) + 1.0) < 1e-12);
    CHECK(wrap_half(0.75) == doctest::Approx(-0.25));
    CHECK(wrap_half(-0.5) == doctest::Approx(0.5));
}

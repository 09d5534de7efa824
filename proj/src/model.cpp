#include "psgzt/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psgzt/error.hpp"

namespace psgzt {

void validate(const ModelParams& p) {
    if (!(p.c >= 0.0) || !std::isfinite(p.c))
        fail(ErrorCode::InvalidArgument, "c must be finite and >= 0, got " + std::to_string(p.c));
    if (!(p.tau > 0.0) || !std::isfinite(p.tau))
        fail(ErrorCode::InvalidArgument, "tau must be finite and > 0, got " + std::to_string(p.tau));
}

const char* to_string(HalfBranch h) {
    switch (h) {
        case HalfBranch::Zero: return "zero";
        case HalfBranch::Lower: return "lower";
        case HalfBranch::Half: return "half";
        case HalfBranch::Upper: return "upper";
    }
    return "?";
}

const char* to_string(Branch b) { return b == Branch::Low ? "low" : "high"; }

DelayDecomp delay_decomp(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau))
        fail(ErrorCode::InvalidArgument, "tau must be finite and > 0");
    DelayDecomp d;
    const double fl = std::floor(tau);
    d.k = static_cast<long>(fl);
    d.theta = tau - fl;  // exact
    if (d.theta > 1.0 - kBoundaryBand) {  // just below an integer: roll over to theta = 0
        d.k += 1;
        d.theta = 0.0;
    }
    const double th = d.theta;
    if (th < kBoundaryBand) {
        d.half = HalfBranch::Zero;
        d.boundary = true;
    } else if (std::abs(th - 0.5) < kBoundaryBand) {
        d.half = HalfBranch::Half;
        d.boundary = true;
    } else {
        d.half = th < 0.5 ? HalfBranch::Lower : HalfBranch::Upper;
    }
    return d;
}

bool is_half_integer(double tau) {
    const double twice = 2.0 * tau;
    return std::abs(twice - std::round(twice)) < 2.0 * kBoundaryBand;
}

double snap_theta(double theta) {
    static constexpr double anchors[] = {0.0, 0.25, 0.5, 0.75};
    for (double a : anchors)
        if (std::abs(theta - a) < kBoundaryBand) return a;
    if (theta > 1.0 - kBoundaryBand) return 0.0;
    return theta;
}

double u_of(double theta) {
    if (theta < -kBoundaryBand || theta > 0.5 + kBoundaryBand)
        fail(ErrorCode::InvalidArgument, "u(theta) needs theta in [0,1/2]");
    return kPi * (2.0 * theta - 0.5);
}

double v_of(double theta) {
    if (theta < 0.5 - kBoundaryBand || theta > 1.0 + kBoundaryBand)
        fail(ErrorCode::InvalidArgument, "v(theta) needs theta in [1/2,1]");
    return kPi * (1.5 - 2.0 * theta);
}

double phase_rhs(double theta) { return theta < 0.5 ? u_of(theta) : v_of(theta); }

double sin2pi(double t) { return std::sin(kTwoPi * std::remainder(t, 1.0)); }
double cos2pi(double t) { return std::cos(kTwoPi * std::remainder(t, 1.0)); }

double wrap_half(double x) {
    double r = std::remainder(x, 1.0);  // [-1/2, 1/2]
    if (r <= -0.5) r += 1.0;
    return r;
}

PhaseSolution solve_phase(const ModelParams& p, Branch branch) {
    validate(p);
    const DelayDecomp d = delay_decomp(p.tau);
    const double theta = snap_theta(d.theta);
    const bool upper = theta > 0.5;
    const bool open_upper = upper;
    const bool open_lower = theta > 0.0 && theta < 0.5;
    if (branch == Branch::High && !open_lower)
        fail(ErrorCode::BranchUnavailable, "HIGH branch exists only for theta in (0,1/2)");

    const double w = phase_rhs(theta);
    const double c = p.c;
    const double c2 = c * c, w2 = w * w;
    const double scale = std::max(c2, w2);

    PhaseSolution s;
    s.branch = branch;
    s.theta = theta;
    s.one_sided = !(open_lower || open_upper);

    if (c2 < w2 - kTrigTol * scale)
        fail(ErrorCode::InsufficientForcing,
             "c^2 = " + std::to_string(c2) + " below " + std::to_string(w2));

    if (c == 0.0) {
        // only reachable with w = 0 (theta = 1/4 or 3/4)
        s.sin2pa = 0.0;
        s.cos2pa = branch == Branch::Low ? 1.0 : -1.0;
        s.fold = true;
    } else if (std::abs(c2 - w2) <= kTrigTol * scale) {
        s.sin2pa = w > 0 ? 1.0 : -1.0;
        s.cos2pa = 0.0;
        s.fold = true;
    } else {
        s.sin2pa = w / c;
        const double root = std::sqrt(c2 - w2) / c;
        s.cos2pa = branch == Branch::Low ? root : -root;
    }

    const double base = std::asin(std::clamp(s.sin2pa, -1.0, 1.0)) / kTwoPi;  // [-1/4, 1/4]
    double alpha = branch == Branch::Low ? base : 0.5 - base;
    if (c == 0.0) alpha = branch == Branch::Low ? 0.0 : 0.5;
    s.alpha = wrap_half(alpha);

    // sign of h(t - tau) for t just after alpha
    double delayed = 0.0;
    if (open_lower) delayed = -1.0;
    else if (open_upper) delayed = 1.0;
    else if (theta == 0.0) delayed = 1.0;
    else delayed = -1.0;
    s.hprime_alpha = -delayed + c * s.cos2pa;
    return s;
}

}  // namespace psgzt

#include "psgzt/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "psgzt/error.hpp"

namespace psgzt {

namespace {

constexpr double kPosTol = 1e-10;
constexpr double kConsistencyBand = 1e-8;
const double kPiSqOver4 = kPi * kPi / 4.0;

double bisect(auto&& f, double lo, double hi, double flo) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double reflect_lower(double theta) { return theta < 0.25 ? 0.5 - theta : theta; }

// Smallest root in [lo, hi] of f where f starts with sign `start`; hi if none found.
double first_crossing(auto&& f, double lo, double hi, int start) {
    if (hi <= lo) return lo;
    const double flo = f(lo);
    if (start < 0 ? flo >= 0.0 : flo <= 0.0) return lo;
    constexpr int N = 256;
    double prev = lo, fprev = flo;
    for (int i = 1; i < N; ++i) {
        const double x = lo + (hi - lo) * i / N;
        const double fx = f(x);
        if (start < 0 ? fx >= 0.0 : fx <= 0.0) return bisect(f, prev, x, fprev);
        prev = x;
        fprev = fx;
    }
    return hi;
}

}  // namespace

const char* to_string(Subregion s) {
    switch (s) {
        case Subregion::Plain: return "PLAIN";
        case Subregion::II: return "II";
        case Subregion::I: return "I";
        case Subregion::III: return "III";
    }
    return "?";
}

const char* to_string(Binding b) {
    switch (b) {
        case Binding::HalfIntegerClause: return "half_integer";
        case Binding::QuarterClause: return "quarter";
        case Binding::WMinus: return "w_minus";
        case Binding::USquared: return "u_squared";
        case Binding::UpperClause: return "upper_clause";
        case Binding::WPlus: return "w_plus";
        case Binding::OutsideDomain: return "outside_domain";
    }
    return "?";
}

double W_minus(double theta, double c) {
    const double u = u_of(theta), c2 = c * c;
    const double s = std::sin(kTwoPi * theta), co = std::cos(kTwoPi * theta);
    const double r = std::sqrt(std::max(0.0, c2 - 1.0));
    const double q = std::sqrt(std::max(0.0, c2 - u * u));
    return u * (s - co * r) - q * (s * r + co) - c2 * std::sin(r);
}

double W_plus(double theta, double c) {
    const double u = u_of(theta), c2 = c * c;
    const double s = std::sin(kTwoPi * theta), co = std::cos(kTwoPi * theta);
    const double r = std::sqrt(std::max(0.0, c2 - 1.0));
    const double q = std::sqrt(std::max(0.0, c2 - u * u));
    return u * (s - co * r) + q * (s * r + co) - c2 * std::sin(r);
}

double theta_hat() {
    static const double value = [] {
        auto g = [](double th) {
            const double u = u_of(th);
            const double r = std::sqrt(std::max(0.0, u * u - 1.0));
            return u * std::sin(r) + std::cos(kTwoPi * th) * r - std::sin(kTwoPi * th);
        };
        const double lo = 0.25 + 1.0 / kTwoPi;  // u = 1
        return bisect(g, lo, 0.5, g(lo));
    }();
    return value;
}

double w_minus_sq(double theta) {
    const double th = theta_hat();
    if (theta < th - kBoundaryBand || theta > 0.5 + kBoundaryBand)
        fail(ErrorCode::InvalidArgument, "w_minus_sq needs theta in [theta_hat, 1/2]");
    theta = std::clamp(theta, th, 0.5);
    const double u2 = std::pow(u_of(theta), 2);
    auto f = [&](double c2) { return W_minus(theta, std::sqrt(c2)); };
    return first_crossing(f, std::max(1.0, u2), u2 + 1.0, -1);
}

double w_plus_sq(double theta) {
    const double th = theta_hat();
    if (theta < 0.25 - kBoundaryBand || theta > th + kBoundaryBand)
        fail(ErrorCode::InvalidArgument, "w_plus_sq needs theta in [1/4, theta_hat]");
    theta = std::clamp(theta, 0.25, th);
    const double u2 = std::pow(u_of(theta), 2);
    auto f = [&](double c2) { return W_plus(theta, std::sqrt(c2)); };
    return first_crossing(f, std::max(1.0, u2), u2 + 1.0, 1);
}

double upper_clause_sq(double theta) {
    const double v = v_of(theta);
    const double q = (kPi / 2.0 + v * std::cos(kTwoPi * theta)) / std::sin(kTwoPi * theta);
    return v * v + q * q;
}

double region_II_bound_sq(double theta) {
    const double u = u_of(theta);
    const double q = (std::sin(kTwoPi * theta) - u) / std::cos(kTwoPi * theta);
    return 1.0 + q * q;
}

RegionVerdict region_R(double theta, double c) {
    const double th = snap_theta(theta);
    const double c2 = c * c;
    RegionVerdict r;
    if (th == 0.0 || th == 0.5) {
        r.binding = Binding::HalfIntegerClause;
        r.margin = c2 - (kPiSqOver4 + 1.0);
        r.in_R = r.margin >= 0.0;
    } else if (th == 0.25) {
        r.binding = Binding::QuarterClause;
        r.margin = c2;
        r.in_R = c2 > 0.0;
    } else if (th < 0.5) {
        const double t = reflect_lower(th);
        if (t <= theta_hat()) {
            r.binding = Binding::USquared;
            r.margin = c2 - std::pow(u_of(t), 2);
        } else {
            r.binding = Binding::WMinus;
            r.margin = c2 - w_minus_sq(t);
        }
        r.in_R = r.margin >= 0.0;
    } else {
        r.binding = Binding::UpperClause;
        r.margin = c2 - upper_clause_sq(th);
        r.in_R = r.margin >= 0.0;
    }
    return r;
}

RegionVerdict region_S(double theta, double c) {
    const double th = snap_theta(theta);
    RegionVerdict r;
    r.binding = Binding::OutsideDomain;
    r.margin = -std::numeric_limits<double>::infinity();
    if (!(th > 0.0 && th < 0.5)) return r;
    const double t = reflect_lower(th);
    if (t > theta_hat()) return r;
    const double c2 = c * c;
    const double below = c2 - std::pow(u_of(t), 2);
    const double above = w_plus_sq(t) - c2;
    r.binding = below <= above ? Binding::USquared : Binding::WPlus;
    r.margin = std::min(below, above);
    r.in_S = below >= 0.0 && above >= 0.0;
    return r;
}

RegionVerdict region_verdict(double theta, double c) {
    RegionVerdict r = region_R(theta, c);
    r.in_S = region_S(theta, c).in_S;
    return r;
}

Subregion classify_subregion(double theta, double c) {
    const double th = snap_theta(theta);
    if (!(th > 0.0 && th < 0.5))
        fail(ErrorCode::InvalidArgument, "classify_subregion needs theta in (0, 1/2)");
    if (th == 0.25) return Subregion::Plain;
    const double t = reflect_lower(th);
    const double u = u_of(t), c2 = c * c;
    if (!(c > 1.0) || c2 < u * u) return Subregion::Plain;
    // t2 < alpha + theta: both halves of the equivalence are required
    const double s = std::sin(kTwoPi * t), co = std::cos(kTwoPi * t);
    const bool sin_side = std::sqrt(c2 - u * u) * s + u * co < -std::sqrt(c2 - 1.0);
    if (!sin_side || !(c2 < region_II_bound_sq(t))) return Subregion::Plain;
    return W_minus(t, c) < 0.0 ? Subregion::I : Subregion::II;
}

Subregion classify_any(double theta, double c) {
    const double th = snap_theta(theta);
    if (th > 0.0 && th < 0.5) return classify_subregion(th, c);
    if (th > 0.5) return c * c < upper_clause_sq(th) ? Subregion::III : Subregion::Plain;
    return Subregion::Plain;
}

double OrbitProfile::p(double t) const {
    const double a = phase.alpha;
    const double r = (t - a) - std::floor(t - a);
    const double x = a + r;
    for (const auto& pc : pieces)
        if (x < pc.t_end) return pc.p_start + pc.s * (x - pc.t_start);
    const auto& last = pieces.back();
    return last.p_start + last.s * (x - last.t_start);
}

double OrbitProfile::eval(double t) const {
    return p(t) + params.c / kTwoPi * (sin2pi(t) - phase.sin2pa);
}

double OrbitProfile::symmetry_residual(int n) const {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = phase.alpha + static_cast<double>(i) / n;
        worst = std::max(worst, std::abs(eval(t) + eval(t + 0.5)));
    }
    return worst;
}

InitialFunction OrbitProfile::history(std::optional<double> t0opt) const {
    const double a = phase.alpha, tau = params.tau, c = params.c;
    const double t0 = t0opt.value_or(a);
    const double lo = t0 - tau;
    SegmentHistory sh;
    const long n0 = static_cast<long>(std::floor(lo - a)) - 1;
    const long n1 = static_cast<long>(std::ceil(t0 - a)) + 1;
    for (long n = n0; n <= n1; ++n) {
        for (const auto& pc : pieces) {
            const double ps = pc.t_start + n, pe = pc.t_end + n;
            const double s0 = std::max(ps, lo), e0 = std::min(pe, t0);
            if (!(e0 > s0)) continue;
            const double p0 = pc.p_start + pc.s * (s0 - ps);
            const double h0 = p0 + c / kTwoPi * (sin2pi(s0) - phase.sin2pa);
            sh.segments.push_back(make_segment(s0, e0, pc.s, h0, c));
        }
    }
    sh.segments.front().t_start = lo;
    sh.segments.back().t_end = t0;
    const long m0 = static_cast<long>(std::floor(2.0 * (lo - a))) - 1;
    const long m1 = static_cast<long>(std::ceil(2.0 * (t0 - a))) + 1;
    for (long m = m0; m <= m1; ++m) {
        const double z = a + 0.5 * m;
        if (z > lo && z < t0) sh.zeros.push_back(z);
    }
    const double r = (lo - a) - std::floor(lo - a);
    sh.sign_at_start = r < 0.5 ? 1 : -1;
    return InitialFunction{t0, sh};
}

OrbitProfile construct_profile(const ModelParams& p, Branch branch) {
    OrbitProfile o;
    o.params = p;
    o.phase = solve_phase(p, branch);
    o.decomp = delay_decomp(p.tau);
    const double th = o.phase.theta;
    const double a = o.phase.alpha;
    auto& pc = o.pieces;
    if (th == 0.0) {
        pc = {{a, a + 0.5, -1, 0.0}, {a + 0.5, a + 1.0, 1, -0.5}};
    } else if (th < 0.5) {
        pc = {{a, a + th, 1, 0.0}, {a + th, a + th + 0.5, -1, th}, {a + th + 0.5, a + 1.0, 1, th - 0.5}};
    } else if (th == 0.5) {
        pc = {{a, a + 0.5, 1, 0.0}, {a + 0.5, a + 1.0, -1, 0.5}};
    } else {
        pc = {{a, a + th - 0.5, -1, 0.0}, {a + th - 0.5, a + th, 1, 0.5 - th}, {a + th, a + 1.0, -1, 1.0 - th}};
    }
    if (p.c > 1.0) {
        const double beta = std::acos(-1.0 / p.c) / kTwoPi;
        o.shape.t1 = beta;
        o.shape.t2 = 1.0 - beta;
        o.shape.h_at_t2 = o.eval(1.0 - beta);
    }
    return o;
}

PositivityReport check_positivity(const OrbitProfile& o, int uniform_samples) {
    const double a = o.phase.alpha, c = o.params.c;
    const double lo = a, hi = a + 0.5;
    std::vector<double> special;
    for (const auto& pc : o.pieces) {
        if (pc.t_start > lo && pc.t_start < hi) special.push_back(pc.t_start);
        if (c >= 1.0) {
            const double beta = std::acos(std::clamp(-pc.s / c, -1.0, 1.0)) / kTwoPi;
            const double s0 = std::max(pc.t_start, lo), e0 = std::min(pc.t_end, hi);
            for (long n = static_cast<long>(std::floor(s0)) - 1; n <= static_cast<long>(std::ceil(e0)) + 1; ++n)
                for (double t : {n + beta, n - beta})
                    if (t > s0 && t < e0) special.push_back(t);
        }
    }
    PositivityReport rep;
    rep.min_h = std::numeric_limits<double>::infinity();
    for (double t : special) {
        const double h = o.eval(t);
        rep.min_h = std::min(rep.min_h, h);
        if (std::abs(h) <= kPosTol && t - lo > 1e-9 && hi - t > 1e-9) {
            rep.degenerate = true;
            rep.touching.push_back(t);
        }
    }
    for (int i = 1; i <= uniform_samples; ++i) {
        const double t = lo + 0.5 * static_cast<double>(i) / (uniform_samples + 1);
        rep.min_h = std::min(rep.min_h, o.eval(t));
    }
    rep.positive = rep.min_h >= -kPosTol;
    return rep;
}

OrbitProfile build_orbit(const ModelParams& p, Branch branch) {
    OrbitProfile o = construct_profile(p, branch);
    const double th = o.phase.theta;
    o.region = branch == Branch::Low ? region_R(th, p.c) : region_S(th, p.c);
    const RegionVerdict other = branch == Branch::Low ? region_S(th, p.c) : region_R(th, p.c);
    if (branch == Branch::Low) o.region.in_S = other.in_S; else o.region.in_R = other.in_R;
    o.positivity = check_positivity(o);
    o.shape.subregion = branch == Branch::Low ? classify_any(th, p.c) : Subregion::Plain;

    const bool by_def = branch == Branch::Low ? o.region.in_R : o.region.in_S;
    const bool by_num = o.positivity.positive;
    if (by_def != by_num && std::abs(o.region.margin) > kConsistencyBand) {
        std::ostringstream os;
        os.precision(17);
        os << "region clause " << to_string(o.region.binding) << " says " << (by_def ? "inside" : "outside")
           << " (margin " << o.region.margin << ") but min h = " << o.positivity.min_h << " at theta=" << th
           << ", c=" << p.c;
        fail(ErrorCode::InternalInconsistency, os.str());
    }
    o.validity.valid = by_num;
    o.validity.degenerate = by_num && o.positivity.degenerate;
    if (o.validity.valid) {
        o.validity.reason = o.validity.degenerate ? "valid with degenerate zeros" : "valid";
    } else {
        std::ostringstream os;
        os.precision(6);
        os << "outside region (" << to_string(o.region.binding) << ", margin " << o.region.margin
           << "), min h = " << o.positivity.min_h;
        o.validity.reason = os.str();
    }
    return o;
}

}  // namespace psgzt

#include "psgzt/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psgzt/error.hpp"

namespace psgzt {

namespace {

constexpr double kZeroTol = 1e-12;
constexpr double kTimeTol = 1e-13;
constexpr double kDegenerateTol = 1e-10;

int sgn(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

double endpoint_tol(double tau) { return 1e-12 * std::max(1.0, tau); }

SignPattern pattern_constant(const ConstantSign& cs) {
    if (cs.sign != 1 && cs.sign != -1)
        fail(ErrorCode::InvalidInitialFunction, "ConstantSign needs sign = +1 or -1");
    if (cs.value_at_0 * cs.sign < 0.0)
        fail(ErrorCode::InvalidInitialFunction, "value_at_0 must match the sign or be 0");
    SignPattern sp;
    sp.initial_sign = cs.sign;
    sp.value_at_t0 = cs.value_at_0;
    sp.sign_before_t0 = cs.sign;
    return sp;
}

SignPattern pattern_linear(const PiecewiseLinear& pl, double t0, double tau) {
    const auto& bp = pl.breakpoints;
    if (bp.size() < 2) fail(ErrorCode::InvalidInitialFunction, "need at least two breakpoints");
    if (std::abs(bp.front().first + tau) > endpoint_tol(tau) || std::abs(bp.back().first) > endpoint_tol(tau))
        fail(ErrorCode::InvalidInitialFunction, "breakpoints must span [-tau, 0]");
    for (std::size_t i = 1; i < bp.size(); ++i) {
        if (!(bp[i].first > bp[i - 1].first))
            fail(ErrorCode::InvalidInitialFunction, "breakpoints must be strictly increasing");
        if (bp[i].second == 0.0 && bp[i - 1].second == 0.0)
            fail(ErrorCode::InvalidInitialFunction, "phi vanishes on an interval");
    }

    int first_sign = 0;
    for (const auto& [s, v] : bp)
        if (sgn(v) != 0) { first_sign = sgn(v); break; }
    if (first_sign == 0) fail(ErrorCode::InvalidInitialFunction, "phi is identically zero");

    std::vector<double> crossings;
    int cur = first_sign;
    for (std::size_t i = 1; i < bp.size(); ++i) {
        const auto [s0, v0] = bp[i - 1];
        const auto [s1, v1] = bp[i];
        const int g1 = sgn(v1);
        if (g1 == 0 || g1 == cur) continue;
        // sign flips somewhere in (s_prev_nonzero, s1]; locate it on this piece
        double z = v0 == 0.0 ? s0 : s0 + (s1 - s0) * v0 / (v0 - v1);
        if (z > -tau && z < 0.0) crossings.push_back(z);
        cur = g1;
    }
    int before_end = first_sign;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
        if (sgn(bp[i].second) != 0) before_end = sgn(bp[i].second);
    if (sgn(bp.back().second) != 0) before_end = sgn(bp.back().second);

    if (crossings.size() != pl.zeros.size())
        fail(ErrorCode::InvalidInitialFunction,
             "declared " + std::to_string(pl.zeros.size()) + " zeros, breakpoints imply " +
                 std::to_string(crossings.size()));
    for (std::size_t i = 0; i < crossings.size(); ++i)
        if (std::abs(crossings[i] - pl.zeros[i]) > 1e-9)
            fail(ErrorCode::InvalidInitialFunction, "declared zero inconsistent with breakpoints");

    SignPattern sp;
    sp.initial_sign = first_sign;
    for (double z : crossings) sp.zeros.push_back(t0 + z);
    sp.value_at_t0 = bp.back().second;
    sp.sign_before_t0 = before_end;
    return sp;
}

SignPattern pattern_segments(const SegmentHistory& sh, const ModelParams& p, double t0) {
    if (sh.segments.empty()) fail(ErrorCode::InvalidInitialFunction, "empty segment history");
    if (sh.sign_at_start != 1 && sh.sign_at_start != -1)
        fail(ErrorCode::InvalidInitialFunction, "sign_at_start must be +1 or -1");
    const double tol = endpoint_tol(p.tau) + 1e-12 * std::abs(t0);
    if (std::abs(sh.segments.front().t_start - (t0 - p.tau)) > tol ||
        std::abs(sh.segments.back().t_end - t0) > tol)
        fail(ErrorCode::InvalidInitialFunction, "segment history must cover [t0 - tau, t0]");
    SignPattern sp;
    sp.initial_sign = sh.sign_at_start;
    sp.zeros = sh.zeros;
    sp.value_at_t0 = sh.segments.back().eval(t0, p.c);
    sp.sign_before_t0 = (sh.zeros.size() % 2 == 0) ? sh.sign_at_start : -sh.sign_at_start;
    return sp;
}

// Scans one monotone-split chunk [a, b] of a segment for sign changes.
class ChunkScanner {
public:
    ChunkScanner(double c, std::vector<Zero>& zeros, std::vector<double>& switching, double gap)
        : c_(c), zeros_(zeros), switching_(switching), gap_(gap) {}

    void scan(const Segment& seg, double a, double b, int& sigma) {
        pts_.clear();
        pts_.push_back(a);
        if (c_ >= 1.0) {
            const double beta = std::acos(std::clamp(-seg.s / c_, -1.0, 1.0)) / kTwoPi;
            const long n0 = static_cast<long>(std::floor(a)) - 1;
            const long n1 = static_cast<long>(std::ceil(b)) + 1;
            for (long n = n0; n <= n1; ++n)
                for (double t : {n + beta, n - beta})
                    if (t > a && t < b) pts_.push_back(t);
            std::sort(pts_.begin() + 1, pts_.end());
            pts_.erase(std::unique(pts_.begin() + 1, pts_.end()), pts_.end());
        }
        pts_.push_back(b);

        double last_t = a;
        pending_.clear();
        const std::size_t n = pts_.size();
        for (std::size_t i = 1; i < n; ++i) {
            const double t = pts_[i];
            const double v = seg.eval(t, c_);
            const bool interior_critical = i + 1 < n;
            if (interior_critical && std::abs(v) < kDegenerateTol) {
                pending_.push_back(t);
                continue;
            }
            const int g = sgn(v);
            if (g == 0) continue;
            if (g == sigma) {
                flush_pending(sigma);
                last_t = t;
                continue;
            }
            const double z = refine(seg, last_t, t, sigma);
            record(z, sigma < 0 ? Direction::Up : Direction::Down);
            pending_.clear();
            sigma = -sigma;
            last_t = t;
        }
    }

    void set_previous(std::optional<double> z) { prev_ = z; }

private:
    double refine(const Segment& seg, double lo, double hi, int sigma) const {
        const double ttol = std::max(kTimeTol, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(hi));
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 300; ++it) {
            const double fx = seg.eval(x, c_);
            if (fx == 0.0) return x;
            if (sgn(fx) == -sigma) hi = x; else lo = x;
            const double d = seg.s + c_ * cos2pi(x);
            double xn = d != 0.0 ? x - fx / d : lo - 1.0;
            if (std::abs(xn - x) < ttol && std::abs(fx) < kZeroTol && xn > lo && xn < hi) return xn;
            if (hi - lo <= ttol) break;
            x = (xn > lo && xn < hi) ? xn : 0.5 * (lo + hi);
        }
        const double flo = std::abs(seg.eval(lo, c_)), fhi = std::abs(seg.eval(hi, c_));
        return flo <= fhi ? lo : hi;
    }

    void record(double z, Direction dir) {
        if (prev_ && z - *prev_ < gap_)
            fail(ErrorCode::AccumulationSuspected,
                 "zeros at " + std::to_string(*prev_) + " and " + std::to_string(z) + " closer than gap");
        zeros_.push_back({z, dir, false});
        switching_.push_back(z);
        prev_ = z;
    }

    void flush_pending(int sigma) {
        for (double t : pending_)
            zeros_.push_back({t, sigma < 0 ? Direction::Up : Direction::Down, true});
        pending_.clear();
    }

    double c_;
    std::vector<Zero>& zeros_;
    std::vector<double>& switching_;
    double gap_;
    std::optional<double> prev_;
    std::vector<double> pts_;
    std::vector<double> pending_;
};

}  // namespace

const char* to_string(Direction d) { return d == Direction::Up ? "UP" : "DOWN"; }

double Segment::eval(double t, double c) const {
    return h_start + s * (t - t_start) + c / kTwoPi * (sin2pi(t) - sin2pi(t_start));
}

Segment make_segment(double t_start, double t_end, int s, double h_start, double c) {
    Segment seg{t_start, t_end, s, h_start, 0.0};
    seg.A = h_start - s * t_start - c / kTwoPi * sin2pi(t_start);
    return seg;
}

SignPattern sign_pattern(const InitialFunction& phi, const ModelParams& p) {
    validate(p);
    if (const auto* cs = std::get_if<ConstantSign>(&phi.form)) return pattern_constant(*cs);
    if (const auto* pl = std::get_if<PiecewiseLinear>(&phi.form)) return pattern_linear(*pl, phi.t0, p.tau);
    return pattern_segments(std::get<SegmentHistory>(phi.form), p, phi.t0);
}

double eval_initial(const InitialFunction& phi, const ModelParams& p, double t) {
    const double s = t - phi.t0;
    if (const auto* cs = std::get_if<ConstantSign>(&phi.form)) return cs->value_at_0 - cs->sign * s;
    if (const auto* pl = std::get_if<PiecewiseLinear>(&phi.form)) {
        const auto& bp = pl->breakpoints;
        if (s <= bp.front().first) return bp.front().second;
        if (s >= bp.back().first) return bp.back().second;
        auto it = std::upper_bound(bp.begin(), bp.end(), s,
                                   [](double x, const std::pair<double, double>& b) { return x < b.first; });
        const auto& [s1, v1] = *it;
        const auto& [s0, v0] = *(it - 1);
        return v0 + (v1 - v0) * (s - s0) / (s1 - s0);
    }
    const auto& segs = std::get<SegmentHistory>(phi.form).segments;
    auto it = std::upper_bound(segs.begin(), segs.end(), t,
                               [](double x, const Segment& sg) { return x < sg.t_start; });
    if (it != segs.begin()) --it;
    return it->eval(t, p.c);
}

double PiecewiseTrajectory::eval(double t) const {
    if (segments.empty() || t < segments.front().t_start) return eval_initial(phi, params, t);
    return segments[segment_index(t)].eval(t, params.c);
}

std::size_t PiecewiseTrajectory::segment_index(double t) const {
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double x, const Segment& sg) { return x < sg.t_start; });
    if (it == segments.begin()) return 0;
    return static_cast<std::size_t>(it - segments.begin()) - 1;
}

std::vector<double> PiecewiseTrajectory::nondegenerate_zeros() const {
    std::vector<double> out;
    for (const auto& z : zeros)
        if (!z.degenerate) out.push_back(z.z);
    return out;
}

PiecewiseTrajectory solve_exact(const InitialFunction& phi, const ModelParams& p, double t_end,
                                const ExactOptions& opts) {
    const SignPattern sp = sign_pattern(phi, p);
    const double t0 = phi.t0;
    if (!(t_end > t0)) fail(ErrorCode::InvalidArgument, "t_end must exceed t0");
    const double tau = p.tau, c = p.c;

    int s = -sp.initial_sign;
    int sigma = sp.sign_before_t0;
    if (opts.require_nondegenerate_start && sp.value_at_t0 == 0.0) {
        const double slope = s + c * cos2pi(t0);
        if (!(-sigma * slope > 0.0))
            fail(ErrorCode::InvalidInitialFunction, "start violates the nondegeneracy condition at t0");
    }

    PiecewiseTrajectory traj;
    traj.params = p;
    traj.phi = phi;

    std::vector<double> switching = sp.zeros;  // all nondegenerate zeros, ordered
    ChunkScanner scanner(c, traj.zeros, switching, opts.accumulation_gap);
    if (!sp.zeros.empty()) scanner.set_previous(sp.zeros.back());

    std::size_t next = 0;
    double T = t0;
    Segment cur = make_segment(t0, t0, s, sp.value_at_t0, c);
    const double inf = std::numeric_limits<double>::infinity();
    while (T < t_end) {
        const double sw = next < switching.size() ? switching[next] + tau : inf;
        const double b = std::min({sw, T + tau, t_end});
        scanner.scan(cur, T, b, sigma);
        T = b;
        int flips = 0;
        while (next < switching.size() && switching[next] + tau <= T) {
            ++next;
            ++flips;
        }
        if (flips % 2 == 1 && T < t_end) {
            cur.t_end = T;
            const double hT = cur.eval(T, c);
            traj.segments.push_back(cur);
            s = -s;
            cur = make_segment(T, T, s, hT, c);
        }
    }
    cur.t_end = t_end;
    traj.segments.push_back(cur);

    // Degenerate zeros sitting exactly on a slope change.
    for (std::size_t i = 1; i < traj.segments.size(); ++i) {
        const double t = traj.segments[i].t_start;
        if (std::abs(traj.segments[i].h_start) >= kDegenerateTol) continue;
        const bool near = std::any_of(traj.zeros.begin(), traj.zeros.end(),
                                      [&](const Zero& z) { return std::abs(z.z - t) < 1e-9; });
        if (near) continue;
        const double before = traj.segments[i - 1].eval(t - 1e-7, c);
        traj.zeros.push_back({t, before < 0 ? Direction::Up : Direction::Down, true});
    }
    std::sort(traj.zeros.begin(), traj.zeros.end(), [](const Zero& a, const Zero& b) { return a.z < b.z; });
    return traj;
}

InitialFunction history_at(const PiecewiseTrajectory& traj, double T) {
    const double tau = traj.params.tau, c = traj.params.c;
    const double lo = T - tau;
    if (lo < traj.t0() || T > traj.t_end())
        fail(ErrorCode::InvalidArgument, "restart window must lie inside the solved range");
    SegmentHistory sh;
    for (const auto& sg : traj.segments) {
        if (sg.t_end <= lo || sg.t_start >= T) continue;
        const double a = std::max(sg.t_start, lo), b = std::min(sg.t_end, T);
        Segment piece = sg;
        piece.t_start = a;
        piece.t_end = b;
        piece.h_start = sg.eval(a, c);
        sh.segments.push_back(piece);
    }
    if (sh.segments.empty()) fail(ErrorCode::InvalidArgument, "no segments in restart window");
    sh.segments.front().t_start = lo;
    sh.segments.back().t_end = T;

    const SignPattern sp = sign_pattern(traj.phi, traj.params);
    std::size_t count = 0;
    for (double z : sp.zeros)
        if (z <= lo) ++count;
    for (const auto& z : traj.zeros) {
        if (z.degenerate) continue;
        if (z.z <= lo) ++count;
        else if (z.z < T) sh.zeros.push_back(z.z);
    }
    sh.sign_at_start = (count % 2 == 0) ? sp.initial_sign : -sp.initial_sign;
    return InitialFunction{T, sh};
}

double SampledTrajectory::eval(double t) const {
    if (h.empty()) return 0.0;
    const double x = (t - t0) / dt;
    if (x <= 0.0) return h.front();
    const std::size_t n = h.size() - 1;
    if (x >= static_cast<double>(n)) return h.back();
    const std::size_t j = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(j);
    return h[j] + f * (h[j + 1] - h[j]);
}

SampledTrajectory solve_bruteforce(const InitialFunction& phi, const ModelParams& p, double t_end,
                                   double dt) {
    validate(p);
    if (!(dt > 0.0) || dt > 1e-4 + 1e-18) fail(ErrorCode::InvalidArgument, "dt must be in (0, 1e-4]");
    const SignPattern sp = sign_pattern(phi, p);
    SampledTrajectory out;
    out.t0 = phi.t0;
    out.dt = dt;
    const std::size_t steps = static_cast<std::size_t>(std::ceil((t_end - phi.t0) / dt - 1e-9));
    out.h.reserve(steps + 1);
    out.h.push_back(sp.value_at_t0);
    const double tau = p.tau, c = p.c;
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = phi.t0 + static_cast<double>(n) * dt;
        const double tm = t + 0.5 * dt;
        const double td = tm - tau;
        double hd;
        if (td < phi.t0) {
            hd = eval_initial(phi, p, std::max(td, phi.t0 - tau));
        } else {
            const double x = (td - phi.t0) / dt;
            const std::size_t j = static_cast<std::size_t>(x);
            if (j + 1 <= n) {
                const double f = x - static_cast<double>(j);
                hd = out.h[j] + f * (out.h[j + 1] - out.h[j]);
            } else {
                hd = out.h[n];
            }
        }
        const double sg = hd > 0.0 ? 1.0 : (hd < 0.0 ? -1.0 : 0.0);
        out.h.push_back(out.h[n] + dt * (-sg + c * cos2pi(tm)));
    }
    return out;
}

std::optional<int> detect_period(const PiecewiseTrajectory& traj, double transient, double tol) {
    const double ts = traj.t0() + transient;
    const double span = traj.t_end() - ts;
    if (!(span >= 10.0 - 1e-9))
        fail(ErrorCode::TooShort, "need at least 10 periods after the transient");
    const int K = static_cast<int>(std::floor(span + 1e-9));
    std::vector<double> samples(K + 1);
    for (int m = 0; m <= K; ++m) samples[m] = traj.eval(std::min(ts + m, traj.t_end()));
    for (int n = 1; n <= 8; ++n) {
        bool ok = true;
        for (int m = 0; m + n <= K && ok; ++m) ok = std::abs(samples[m + n] - samples[m]) < tol;
        if (ok) return n;
    }
    return std::nullopt;
}

}  // namespace psgzt

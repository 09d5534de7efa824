#include "psgzt/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "psgzt/error.hpp"
#include "psgzt/orbit.hpp"

namespace psgzt {

void SmoothParams::validate() const {
    if (!(kappa >= 1.0 && kappa <= 200.0)) fail(ErrorCode::InvalidArgument, "kappa must lie in [1, 200]");
    if (!(c >= 0.0) || !std::isfinite(c)) fail(ErrorCode::InvalidArgument, "c must be finite and >= 0");
    if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorCode::InvalidArgument, "tau must be finite and > 0");
}

double default_smooth_dt(double tau) {
    // Largest dt <= min(1e-3, tau/20) with 1/dt integral so integer times land on the grid.
    const double cap = std::min(1e-3, tau / 20.0);
    return 1.0 / std::ceil(1.0 / cap);
}

namespace {

class DenseRun {
public:
    DenseRun(const SmoothParams& p, const HistoryFn& hist, double dt) : p_(p), dt_(dt) {
        back_ = static_cast<long>(std::ceil(p.tau / dt)) + 4;
        buf_.reserve(static_cast<std::size_t>(back_) + 1024);
        for (long m = back_; m >= 1; --m) {
            const double t = std::max(-p.tau, -static_cast<double>(m) * dt);
            buf_.push_back(hist(t));
        }
        buf_.push_back(hist(0.0));
    }

    // index of t = 0 in buf_
    long origin() const { return back_; }
    const std::vector<double>& buf() const { return buf_; }
    double now() const { return static_cast<double>(buf_.size() - 1 - back_) * dt_; }

    void step() {
        const long n = static_cast<long>(buf_.size()) - 1;
        const double t = static_cast<double>(n - back_) * dt_;
        const double h = buf_[static_cast<std::size_t>(n)];
        const double k1 = rhs(t, delayed(t));
        const double dm = delayed(t + 0.5 * dt_);
        const double k2 = rhs(t + 0.5 * dt_, dm);
        const double k3 = k2;  // delayed input does not depend on the stage state
        const double k4 = rhs(t + dt_, delayed(t + dt_));
        buf_.push_back(h + dt_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }

    double at(double t) const {
        const double x = t / dt_ + static_cast<double>(back_);
        long i = static_cast<long>(std::floor(x)) - 1;
        const long last = static_cast<long>(buf_.size()) - 4;
        i = std::clamp(i, 0L, last);
        const double s = x - static_cast<double>(i);
        const double* y = &buf_[static_cast<std::size_t>(i)];
        // Lagrange basis on nodes 0, 1, 2, 3
        const double l0 = -(s - 1) * (s - 2) * (s - 3) / 6.0;
        const double l1 = s * (s - 2) * (s - 3) / 2.0;
        const double l2 = -s * (s - 1) * (s - 3) / 2.0;
        const double l3 = s * (s - 1) * (s - 2) / 6.0;
        return l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3];
    }

private:
    double delayed(double t) const { return at(t - p_.tau); }
    double rhs(double t, double hd) const {
        return -std::tanh(p_.kappa * hd) + p_.c * std::cos(kTwoPi * std::remainder(t, 1.0));
    }

    SmoothParams p_;
    double dt_;
    long back_;
    std::vector<double> buf_;
};

void check_dt(const SmoothParams& p, double dt) {
    if (!(dt > 0.0) || dt > std::min(1e-3, p.tau / 20.0) * (1.0 + 1e-12))
        fail(ErrorCode::InvalidArgument, "dt must satisfy 0 < dt <= min(1e-3, tau/20)");
}

}  // namespace

SampledTrajectory integrate_smooth(const SmoothParams& p, const HistoryFn& history, double t_end,
                                   double dt) {
    p.validate();
    check_dt(p, dt);
    if (!(t_end > 0.0)) fail(ErrorCode::InvalidArgument, "t_end must be > 0");
    DenseRun run(p, history, dt);
    const long steps = static_cast<long>(std::llround(t_end / dt));
    for (long i = 0; i < steps; ++i) run.step();
    SampledTrajectory out;
    out.t0 = 0.0;
    out.dt = dt;
    out.h.assign(run.buf().begin() + run.origin(), run.buf().end());
    return out;
}

HistoryFn seed_history(const SmoothParams& p) {
    try {
        OrbitProfile orb = build_orbit(ModelParams{p.c, p.tau}, Branch::Low);
        // The small ramp breaks the 1-periodicity of the seed, which the smooth flow would preserve.
        const double tau = p.tau;
        if (orb.validity.valid) return [orb, tau](double t) { return orb.eval(t) + 1e-3 * (t + tau) / tau; };
    } catch (const Error&) {
    }
    return [](double t) { return 0.5 + t; };
}

namespace {

constexpr double kContractionMargin = 1e-3;
constexpr double kDriftFloor = 1e-12;  // below this the drift is rounding noise

// max |h(t+1) - h(t)| for t in [n, n+1) on the grid, per period n.
std::vector<double> period_drifts(const SampledTrajectory& tr, long per) {
    const long periods = static_cast<long>(tr.h.size() - 1) / per - 1;
    std::vector<double> d(static_cast<std::size_t>(std::max(0L, periods)), 0.0);
    for (long n = 0; n < periods; ++n) {
        double m = 0.0;
        for (long i = n * per; i < (n + 1) * per; ++i)
            m = std::max(m, std::abs(tr.h[static_cast<std::size_t>(i + per)] - tr.h[static_cast<std::size_t>(i)]));
        d[static_cast<std::size_t>(n)] = m;
    }
    return d;
}

}  // namespace

Period1Result classify_period1(const SmoothParams& p, const ClassifyOptions& opt) {
    p.validate();
    const double dt = opt.dt > 0.0 ? opt.dt : default_smooth_dt(p.tau);
    const double per_d = 1.0 / dt;
    const long per = std::lround(per_d);
    if (std::abs(per_d - static_cast<double>(per)) > 1e-9)
        fail(ErrorCode::InvalidArgument, "1/dt must be an integer for stroboscopic sampling");
    const double total = std::ceil(opt.transient + opt.horizon) + 1.0;
    const SampledTrajectory tr = integrate_smooth(p, seed_history(p), total, dt);
    const auto d = period_drifts(tr, per);

    Period1Result r;
    r.drift = d.back();
    const std::size_t window = std::min<std::size_t>(100, d.size() / 4);
    const std::size_t n = d.size();
    // least-squares slope of log drift over the final window
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t i = n - window; i < n; ++i) {
        if (d[i] <= kDriftFloor) continue;
        const double x = static_cast<double>(i), y = std::log(d[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) {
        const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        r.ratio = std::exp(slope);
    }
    r.stable = r.drift < kDriftFloor || (r.drift < opt.tol && r.ratio <= 1.0);
    if (!r.stable && opt.contraction) r.stable = r.ratio < 1.0 - kContractionMargin;
    return r;
}

BoundaryEstimate smooth_boundary_bisect(double kappa, double tau, double c_lo, double c_hi,
                                        const ClassifyOptions& opt, double dc) {
    if (!(c_lo < c_hi)) fail(ErrorCode::InvalidArgument, "need c_lo < c_hi");
    BoundaryEstimate e;
    e.horizon = opt.horizon;
    auto stable_at = [&](double c) {
        ++e.evaluations;
        return classify_period1(SmoothParams{kappa, c, tau}, opt).stable;
    };
    const bool lo_stable = stable_at(c_lo);
    const bool hi_stable = stable_at(c_hi);
    if (lo_stable == hi_stable || lo_stable)
        fail(ErrorCode::SameClassAtBracket, "bracket endpoints do not straddle the boundary");
    while (c_hi - c_lo > dc) {
        const double mid = 0.5 * (c_lo + c_hi);
        (stable_at(mid) ? c_hi : c_lo) = mid;
    }
    e.c_lo = c_lo;
    e.c_hi = c_hi;
    e.c = 0.5 * (c_lo + c_hi);
    return e;
}

RotationEstimate smooth_rotation_estimate(const SmoothParams& p, int iterates, double transient, double dt) {
    p.validate();
    if (iterates < 200) fail(ErrorCode::InvalidArgument, "need at least 200 iterates");
    if (dt <= 0.0) dt = default_smooth_dt(p.tau);
    const long per = std::lround(1.0 / dt);
    const double total = std::ceil(transient) + iterates + 3.0;
    const SampledTrajectory tr = integrate_smooth(p, seed_history(p), total, dt);
    const long lag = std::lround(p.tau / dt);
    const long n0 = static_cast<long>(std::ceil(transient));

    std::vector<std::complex<double>> z;
    for (long n = n0; n < n0 + iterates + 2; ++n) {
        const long i = n * per;
        z.emplace_back(tr.h[static_cast<std::size_t>(i)], tr.h[static_cast<std::size_t>(i - lag)]);
    }
    // Successive differences rotate like the deviations but need no estimate of the centre.
    std::vector<std::complex<double>> w;
    std::vector<double> norms;
    for (std::size_t i = 1; i < z.size(); ++i) {
        w.push_back(z[i] - z[i - 1]);
        norms.push_back(std::abs(w.back()));
    }
    bool decaying = true;
    for (std::size_t i = 1; i < norms.size() && decaying; ++i) decaying = norms[i] <= norms[i - 1];
    const double scale = *std::max_element(norms.begin(), norms.end());
    if (decaying || scale < 1e-9) fail(ErrorCode::NotOscillatory, "stroboscopic deviations decay monotonically");

    std::vector<double> ang;
    for (std::size_t i = 1; i < w.size(); ++i) ang.push_back(std::arg(w[i] / w[i - 1]));
    double m = 0.0;
    for (double a : ang) m += a;
    m /= static_cast<double>(ang.size());
    double var = 0.0;
    for (double a : ang) var += (a - m) * (a - m);
    var /= static_cast<double>(ang.size() - 1);
    RotationEstimate r;
    r.rho = std::abs(m) / kTwoPi;
    r.stderr_ = std::sqrt(var / static_cast<double>(ang.size())) / kTwoPi;
    r.iterates = static_cast<int>(ang.size());
    return r;
}

}  // namespace psgzt

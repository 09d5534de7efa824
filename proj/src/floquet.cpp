#include "psgzt/floquet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "psgzt/error.hpp"
#include "psgzt/orbit.hpp"

namespace psgzt {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "STABLE";
        case Verdict::Unstable: return "UNSTABLE";
        case Verdict::Critical: return "CRITICAL";
    }
    return "?";
}

double CharPoly::eval(double x) const {
    double acc = 0.0;
    for (int i = degree; i >= 0; --i) acc = acc * x + coeffs[i];
    return acc;
}

std::complex<double> CharPoly::eval(std::complex<double> z) const {
    std::complex<double> acc = 0.0;
    for (int i = degree; i >= 0; --i) acc = acc * z + coeffs[i];
    return acc;
}

CharPoly char_poly_from_hprime(long k, bool upper, double hprime) {
    if (k < 0) fail(ErrorCode::InvalidArgument, "k must be >= 0");
    if (!(hprime > 0.0)) fail(ErrorCode::NoOrbit, "h'(alpha) must be positive");
    CharPoly cp;
    cp.k = k;
    cp.upper = upper;
    cp.hprime = hprime;
    const double g = 4.0 / hprime, g2 = g * g / 4.0;  // 4/h', 4/h'^2
    if (!upper) {
        cp.degree = static_cast<int>(2 * k + 1);
        cp.coeffs.assign(cp.degree + 1, 0.0);
        cp.coeffs[2 * k + 1] += 1.0;
        cp.coeffs[2 * k] -= 1.0;
        cp.coeffs[k] += g;
        cp.coeffs[0] -= g2;
    } else {
        cp.degree = static_cast<int>(2 * k + 2);
        cp.coeffs.assign(cp.degree + 1, 0.0);
        cp.coeffs[2 * k + 2] += 1.0;
        cp.coeffs[2 * k + 1] -= 1.0;
        cp.coeffs[k + 1] += g;
        cp.coeffs[0] += g2;
    }
    return cp;
}

CharPoly char_poly(const ModelParams& p, Branch branch) {
    validate(p);
    if (is_half_integer(p.tau))
        fail(ErrorCode::HalfIntegerDelay, "tau = " + std::to_string(p.tau) + " is a multiple of 1/2");
    const OrbitProfile o = build_orbit(p, branch);
    if (!o.validity.valid) fail(ErrorCode::NoOrbit, o.validity.reason);
    if (o.validity.degenerate) fail(ErrorCode::DegenerateOrbit, "orbit has degenerate zeros");
    return char_poly_from_hprime(o.decomp.k, o.phase.theta > 0.5, o.phase.hprime_alpha);
}

double FloquetSpectrum::dominant_rho() const { return std::abs(std::arg(dominant)) / kTwoPi; }

namespace {

std::complex<long double> eval_ld(const CharPoly& cp, std::complex<long double> z,
                                  std::complex<long double>* deriv) {
    std::complex<long double> f = 0.0L, d = 0.0L;
    for (int i = cp.degree; i >= 0; --i) {
        d = d * z + f;
        f = f * z + static_cast<long double>(cp.coeffs[i]);
    }
    if (deriv) *deriv = d;
    return f;
}

double residual_bound(const CharPoly& cp, std::complex<double> z) {
    return 1e-10 * std::pow(1.0 + std::abs(z), cp.degree);
}

}  // namespace

FloquetSpectrum spectrum(const CharPoly& cp) {
    if (cp.degree < 1 || static_cast<int>(cp.coeffs.size()) != cp.degree + 1 || cp.coeffs.back() != 1.0)
        fail(ErrorCode::InvalidArgument, "polynomial must be monic with degree >= 1");
    const int n = cp.degree;
    std::vector<std::complex<double>> roots;
    if (n == 1) {
        roots.push_back(-cp.coeffs[0]);
    } else {
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i) comp(i, n - 1) = -cp.coeffs[i];
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        if (es.info() != Eigen::Success) fail(ErrorCode::ConvergenceFailure, "companion eigenvalues failed");
        for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i]);
    }

    FloquetSpectrum sp;
    for (auto& r : roots) {
        std::complex<long double> z(r.real(), r.imag());
        std::complex<long double> d;
        long double best = std::abs(eval_ld(cp, z, &d));
        for (int it = 0; it < 1000 && best > 0.0L; ++it) {
            const auto f = eval_ld(cp, z, &d);
            if (std::abs(d) == 0.0L) break;
            const auto zn = z - f / d;
            const long double fn = std::abs(eval_ld(cp, zn, nullptr));
            if (!(fn < best)) break;
            z = zn;
            best = fn;
        }
        r = std::complex<double>(static_cast<double>(z.real()), static_cast<double>(z.imag()));
        if (std::abs(r.imag()) < 1e-15 * std::max(1.0, std::abs(r.real()))) r.imag(0.0);
        const double res = std::abs(cp.eval(r));
        sp.max_residual = std::max(sp.max_residual, res);
        if (res >= residual_bound(cp, r))
            fail(ErrorCode::ConvergenceFailure, "root residual " + std::to_string(res) + " too large");
    }
    std::sort(roots.begin(), roots.end(), [](auto x, auto y) {
        if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
        return x.imag() > y.imag();
    });
    sp.roots = roots;
    sp.dominant = roots.front();
    sp.max_modulus = std::abs(roots.front());
    if (sp.max_modulus < 1.0 - kCriticalBand) sp.verdict = Verdict::Stable;
    else if (sp.max_modulus <= 1.0 + kCriticalBand) sp.verdict = Verdict::Critical;
    else sp.verdict = Verdict::Unstable;

    for (const auto& r : roots) {
        if (std::abs(std::abs(r) - 1.0) > kCriticalBand || r.imag() <= 1e-12) continue;
        const double w = std::arg(r);
        if (!sp.crossing || w < sp.crossing->omega) sp.crossing = Crossing{w, w / kTwoPi};
    }
    return sp;
}

PerturbationState advance(const PerturbationState& s, long k, bool upper, double hprime) {
    const double g = 2.0 / hprime;
    const auto& a = s.a;
    const auto& b = s.b;
    double an, bn;
    if (!upper) {
        an = a[0] - g * (a[k] + b[k]);
        const double a_next = k == 0 ? an : a[k - 1];
        bn = b[0] - g * (b[k] + a_next);
    } else {
        an = a[0] - g * (b[k + 1] + a[k]);
        bn = b[0] - g * (a[k] + b[k]);
    }
    PerturbationState out;
    out.a.resize(a.size());
    out.b.resize(b.size());
    out.a[0] = an;
    out.b[0] = bn;
    std::copy(a.begin(), a.end() - 1, out.a.begin() + 1);
    std::copy(b.begin(), b.end() - 1, out.b.begin() + 1);
    return out;
}

namespace {

double norm(const PerturbationState& s) {
    double acc = 0.0;
    for (double x : s.a) acc += x * x;
    for (double x : s.b) acc += x * x;
    return std::sqrt(acc);
}

void scale(PerturbationState& s, double f) {
    for (double& x : s.a) x *= f;
    for (double& x : s.b) x *= f;
}

double dot(const PerturbationState& x, const PerturbationState& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i) acc += x.a[i] * y.a[i] + x.b[i] * y.b[i];
    return acc;
}

// Advance and remove the translation mode (a = 1, b = -1) via Wielandt deflation.
PerturbationState step(const PerturbationState& s, long k, bool upper, double hp) {
    PerturbationState n = advance(s, k, upper, hp);
    const double w = s.a[0];
    for (double& x : n.a) x -= w;
    for (double& x : n.b) x += w;
    return n;
}

// Modulus estimate from a two-term fit y2 = p y1 + q y0.
double fit_modulus(const PerturbationState& y0, const PerturbationState& y1, const PerturbationState& y2) {
    const double a00 = dot(y0, y0), a01 = dot(y0, y1), a11 = dot(y1, y1);
    const double r0 = dot(y2, y0), r1 = dot(y2, y1);
    const double det = a11 * a00 - a01 * a01;
    if (a00 == 0.0) return 0.0;
    if (std::abs(det) <= 1e-13 * a00 * a11) return std::abs(a01 / a00);
    const double p = (r1 * a00 - r0 * a01) / det;
    const double q = (r0 * a11 - r1 * a01) / det;
    const double disc = p * p + 4.0 * q;
    if (disc < 0.0) return std::sqrt(-q);
    const double sq = std::sqrt(disc);
    return std::max(std::abs(0.5 * (p + sq)), std::abs(0.5 * (p - sq)));
}

}  // namespace

PowerIterationResult power_iteration(const ModelParams& p, Branch branch, long iterations,
                                     std::uint64_t seed) {
    const CharPoly cp = char_poly(p, branch);
    const long k = cp.k;
    const std::size_t depth = static_cast<std::size_t>(k + 2);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    PerturbationState x;
    x.a.resize(depth);
    x.b.resize(depth);
    for (auto& v : x.a) v = nd(rng);
    for (auto& v : x.b) v = nd(rng);

    PowerIterationResult res;
    double prev = -1.0;
    int stable_checks = 0;
    for (long it = 0; it < iterations; it += 3) {
        const double nx = norm(x);
        if (nx == 0.0) {
            res.growth = 0.0;
            res.iterations = it;
            return res;
        }
        scale(x, 1.0 / nx);
        const PerturbationState y1 = step(x, k, cp.upper, cp.hprime);
        const PerturbationState y2 = step(y1, k, cp.upper, cp.hprime);
        const double est = fit_modulus(x, y1, y2);
        x = step(y2, k, cp.upper, cp.hprime);
        res.iterations = it + 3;
        res.last_change = std::abs(est - prev);
        res.growth = est;
        if (res.last_change <= 1e-13 * std::max(1.0, est)) {
            if (++stable_checks >= 5) break;
        } else {
            stable_checks = 0;
        }
        prev = est;
    }
    return res;
}

double power_iteration_check(const ModelParams& p, Branch branch, long iterations, std::uint64_t seed) {
    const PowerIterationResult r = power_iteration(p, branch, iterations, seed);
    if (r.last_change > 1e-8 * std::max(1.0, r.growth))
        fail(ErrorCode::ConvergenceFailure,
             "power iteration did not settle; last change " + std::to_string(r.last_change));
    return r.growth;
}

}  // namespace psgzt

#include "psgzt/atlas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "psgzt/error.hpp"
#include "psgzt/floquet.hpp"
#include "psgzt/orbit.hpp"

namespace psgzt {

namespace {

double csc(double x) { return 1.0 / std::sin(x); }
double sec(double x) { return 1.0 / std::cos(x); }

long denom(long k, bool upper) { return upper ? 4 * k + 3 : 4 * k + 1; }

void check_interior(bool upper, double theta) {
    const bool ok = upper ? (theta > 0.5 && theta < 1.0) : (theta > 0.0 && theta < 0.5);
    if (!ok) fail(ErrorCode::InvalidArgument, "theta must lie strictly inside the half-interval");
}

double curve_c(double hprime, bool upper, double theta) {
    if (upper) return std::sqrt(std::pow(hprime + 1.0, 2) + std::pow(v_of(theta), 2));
    return std::sqrt(std::pow(hprime - 1.0, 2) + std::pow(u_of(theta), 2));
}

}  // namespace

const char* to_string(CurveId id) {
    switch (id) {
        case CurveId::T: return "T";
        case CurveId::SN: return "SN";
        case CurveId::BC_minus: return "BC_minus";
        case CurveId::BC_plus: return "BC_plus";
        case CurveId::Bj: return "Bj";
        case CurveId::SIGNUM_T: return "SIGNUM_T";
        case CurveId::JOIN: return "JOIN";
    }
    return "?";
}

double torus_hprime(long k, bool upper) {
    if (k < 0) fail(ErrorCode::InvalidArgument, "k must be >= 0");
    if (!upper && k == 0) fail(ErrorCode::NoTorusBranch, "no torus branch for k = 0 with theta in (0,1/2)");
    return csc(kPi / (2.0 * denom(k, upper)));
}

double torus_rho(long k, bool upper) {
    if (!upper && k == 0) fail(ErrorCode::NoTorusBranch, "no torus branch for k = 0 with theta in (0,1/2)");
    return 1.0 / static_cast<double>(denom(k, upper));
}

double torus_c(long k, bool upper, double theta) {
    check_interior(upper, theta);
    return curve_c(torus_hprime(k, upper), upper, theta);
}

std::vector<CurveSample> torus_curve_T(long k, bool upper, const std::vector<double>& theta_grid) {
    std::vector<CurveSample> out;
    const double rho = torus_rho(k, upper);
    for (double th : theta_grid) {
        CurveSample s;
        s.id = CurveId::T;
        s.tau = static_cast<double>(k) + th;
        s.c = torus_c(k, upper, th);
        s.rho = rho;
        s.j = 1;
        s.k = k;
        s.upper = upper;
        out.push_back(s);
    }
    return out;
}

std::vector<CurveSample> sn_curve(const std::vector<double>& theta_grid) {
    const double th = theta_hat();
    std::vector<CurveSample> out;
    for (double t : theta_grid) {
        if (t < 0.5 - th - kBoundaryBand || t > th + kBoundaryBand)
            fail(ErrorCode::InvalidArgument, "SN curve lives on [1/2 - theta_hat, theta_hat]");
        CurveSample s;
        s.id = CurveId::SN;
        s.tau = t;
        s.c = std::abs(u_of(std::clamp(t, 0.0, 0.5)));
        out.push_back(s);
    }
    return out;
}

std::vector<CurveSample> bc_curves(const std::vector<double>& theta_grid) {
    const double th = theta_hat();
    std::vector<CurveSample> out;
    for (double t : theta_grid) {
        if (!(t > 0.0 && t < 0.5)) fail(ErrorCode::InvalidArgument, "BC curves live on (0, 1/2)");
        const double r = t < 0.25 ? 0.5 - t : t;
        CurveSample s;
        s.tau = t;
        if (r > th) {
            s.id = CurveId::BC_minus;
            s.c = std::sqrt(w_minus_sq(r));
        } else {
            s.id = CurveId::BC_plus;
            s.c = std::sqrt(w_plus_sq(std::max(r, 0.25)));
        }
        out.push_back(s);
    }
    return out;
}

std::vector<int> valid_j(long k, bool upper) {
    std::vector<int> js;
    const long jmax = upper ? 2 * k + 1 : 2 * k;
    for (int j = 1; j <= jmax; ++j) {
        const int r = j % 4;
        if (upper ? (r == 1 || r == 2) : (r == 0 || r == 1)) js.push_back(j);
    }
    return js;
}

JBranch general_j_branch(long k, bool upper, int j) {
    const auto js = valid_j(k, upper);
    if (std::find(js.begin(), js.end(), j) == js.end())
        fail(ErrorCode::InvalidJ, "j = " + std::to_string(j) + " not admissible for k = " + std::to_string(k));
    const double n = static_cast<double>(denom(k, upper));
    const double x = j * kPi / (2.0 * n);
    JBranch b;
    b.k = k;
    b.upper = upper;
    b.j = j;
    if (j % 2 == 1) {
        b.hprime = (((j - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * csc(x);
    } else {
        const int e = upper ? (j - 2) / 2 : j / 2;
        b.hprime = (e % 2 == 0 ? 1.0 : -1.0) * sec(x);
    }
    b.omega = 2.0 * j * kPi / n;
    return b;
}

double JBranch::c_of(double theta) const {
    check_interior(upper, theta);
    return curve_c(hprime, upper, theta);
}

CurveSample JBranch::sample(double theta) const {
    CurveSample s;
    s.id = j == 1 ? CurveId::T : CurveId::Bj;
    s.tau = static_cast<double>(k) + theta;
    s.c = c_of(theta);
    const double w = std::remainder(omega, kTwoPi);
    s.rho = std::abs(w) / kTwoPi;
    s.j = j;
    s.k = k;
    s.upper = upper;
    return s;
}

std::optional<JBranch> secondary_branch(long k, bool upper) {
    std::optional<JBranch> best;
    for (int j : valid_j(k, upper)) {
        if (j == 1) continue;
        JBranch b = general_j_branch(k, upper, j);
        if (!best || b.hprime > best->hprime) best = b;
    }
    return best;
}

CurveSample signum_forced_boundary(long k, bool upper) {
    const double hp = torus_hprime(k, upper);
    CurveSample s;
    s.id = CurveId::SIGNUM_T;
    s.c = upper ? hp + 1.0 : hp - 1.0;
    s.rho = torus_rho(k, upper);
    s.k = k;
    s.upper = upper;
    s.tau = static_cast<double>(k) + (upper ? 0.75 : 0.25);
    return s;
}

std::optional<CurveSample> boundary_at(double tau) {
    if (is_half_integer(tau)) return std::nullopt;
    const DelayDecomp d = delay_decomp(tau);
    const double th = d.theta;
    const bool upper = th > 0.5;
    if (d.k == 0 && !upper) {
        const double r = th < 0.25 ? 0.5 - th : th;
        CurveSample s;
        s.tau = tau;
        if (r <= theta_hat()) {
            s.id = CurveId::SN;
            s.c = std::abs(u_of(th));
            s.rho = 0.0;
        } else {
            s.id = CurveId::BC_minus;
            s.c = std::sqrt(w_minus_sq(r));
        }
        return s;
    }
    CurveSample s = torus_curve_T(d.k, upper, {th}).front();
    s.tau = tau;
    return s;
}

std::vector<CurveSample> stability_boundary_B(const std::vector<double>& tau_grid) {
    std::vector<CurveSample> out;
    if (tau_grid.empty()) return out;
    for (double t : tau_grid)
        if (auto s = boundary_at(t)) out.push_back(*s);

    const auto [lo_it, hi_it] = std::minmax_element(tau_grid.begin(), tau_grid.end());
    const long m0 = static_cast<long>(std::floor(2.0 * *lo_it)) + 1;
    const long m1 = static_cast<long>(std::ceil(2.0 * *hi_it)) - 1;
    const double u_half = kPi / 2.0;
    for (long m = std::max(1L, m0); m <= m1; ++m) {
        const double tj = 0.5 * m;
        const long k = m / 2;
        double left, right;
        if (m % 2 == 1) {  // tau = k + 1/2
            left = k == 0 ? std::sqrt(kPi * kPi / 4.0 + 1.0)
                          : std::sqrt(std::pow(torus_hprime(k, false) - 1.0, 2) + u_half * u_half);
            right = std::sqrt(std::pow(torus_hprime(k, true) + 1.0, 2) + u_half * u_half);
        } else {  // tau = k
            left = std::sqrt(std::pow(torus_hprime(k - 1, true) + 1.0, 2) + u_half * u_half);
            right = std::sqrt(std::pow(torus_hprime(k, false) - 1.0, 2) + u_half * u_half);
        }
        for (double cval : {left, right}) {
            CurveSample s;
            s.id = CurveId::JOIN;
            s.tau = tj;
            s.c = cval;
            s.k = k;
            out.push_back(s);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const CurveSample& a, const CurveSample& b) { return a.tau < b.tau; });
    return out;
}

std::vector<double> open_grid(double lo, double hi, int n) {
    std::vector<double> g;
    if (n <= 0) return g;
    const double a = lo + 1e-6, b = hi - 1e-6;
    if (n == 1) return {0.5 * (a + b)};
    for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
    return g;
}

std::vector<double> GridAxis::values() const {
    std::vector<double> v;
    if (n <= 0) return v;
    if (n == 1) return {lo};
    for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
    return v;
}

SweepRow sweep_point(double tau, double c) {
    SweepRow row;
    row.tau = tau;
    row.c = c;
    row.max_modulus = std::numeric_limits<double>::quiet_NaN();
    row.rho = std::numeric_limits<double>::quiet_NaN();
    try {
        const DelayDecomp d = delay_decomp(tau);
        const RegionVerdict rv = region_verdict(d.theta, c);
        row.in_R = rv.in_R;
        row.in_S = rv.in_S;
        if (is_half_integer(tau)) {
            row.verdict = "HALF_INTEGER";
            return row;
        }
        const FloquetSpectrum sp = spectrum(char_poly(ModelParams{c, tau}, Branch::Low));
        row.verdict = to_string(sp.verdict);
        row.max_modulus = sp.max_modulus;
        row.rho = sp.dominant_rho();
    } catch (const Error& e) {
        switch (e.code()) {
            case ErrorCode::NoOrbit:
            case ErrorCode::InsufficientForcing: row.verdict = "NO_ORBIT"; break;
            case ErrorCode::DegenerateOrbit: row.verdict = "DEGENERATE"; break;
            case ErrorCode::HalfIntegerDelay: row.verdict = "HALF_INTEGER"; break;
            default: row.verdict = "ERROR"; row.error = e.what(); break;
        }
    }
    return row;
}

unsigned env_thread_cap() {
    const char* s = std::getenv("PSGZT_THREADS");
    if (!s || !*s) return 0;
    const long v = std::strtol(s, nullptr, 10);
    return v > 0 ? static_cast<unsigned>(v) : 0;
}

std::vector<SweepRow> sweep(const GridAxis& tau, const GridAxis& c, unsigned threads) {
    const auto ts = tau.values();
    const auto cs = c.values();
    const std::size_t n = ts.size() * cs.size();
    std::vector<SweepRow> rows(n);
    if (n == 0) return rows;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (const unsigned cap = env_thread_cap(); cap > 0) threads = std::min(threads, cap);
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) rows[i] = sweep_point(ts[i / cs.size()], cs[i % cs.size()]);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return rows;
}

}  // namespace psgzt

// Acceptance checks: one PASS/FAIL line per criterion. Exit status 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "psgzt/atlas.hpp"
#include "psgzt/error.hpp"
#include "psgzt/floquet.hpp"
#include "psgzt/ivp.hpp"
#include "psgzt/orbit.hpp"
#include "psgzt/smooth.hpp"

using namespace psgzt;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void run(int id, const char* title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s):%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.str().c_str(), secs);
    std::fflush(stdout);
}

bool unit_pair_at(const FloquetSpectrum& sp, double omega, double tol) {
    int hits = 0;
    for (auto r : sp.roots)
        if (std::abs(std::abs(r) - 1.0) < tol && std::abs(std::abs(std::arg(r)) - omega) < tol) ++hits;
    return hits >= 2;
}

bool near_half_multiple(double tau, double d) { return std::abs(tau * 2 - std::round(tau * 2)) < 2 * d; }

}  // namespace

int main() {
    const double pi2_4 = M_PI * M_PI / 4;

    run(1, "theta_hat and boundary-function endpoints", [&](Outcome& o) {
        const double th = theta_hat();
        const double a = w_minus_sq(th), b = w_minus_sq(0.5), c = w_plus_sq(0.25), d = w_plus_sq(th);
        o.detail << " theta_hat=" << th << " w-^2(theta_hat)=" << a << " w-^2(1/2)=" << b << " w+^2(1/4)=" << c
                 << " w+^2(theta_hat)=" << d;
        o.require(std::abs(th - 0.4695) < 1e-3, "theta_hat within 1e-3 of 0.4695");
        o.require(std::abs(a - pi2_4) < 1e-8, "w-^2(theta_hat) = pi^2/4");
        o.require(std::abs(b - (pi2_4 + 1)) < 1e-8, "w-^2(1/2) = pi^2/4 + 1");
        o.require(std::abs(c - 1.0) < 1e-8, "w+^2(1/4) = 1");
        o.require(std::abs(d - pi2_4) < 1e-8, "w+^2(theta_hat) = pi^2/4");
    });

    run(2, "torus boundary exactness", [&](Outcome& o) {
        const double c1 = torus_c(0, true, 0.75), c2 = torus_c(1, false, 0.25);
        o.detail << " c_T(0,3/4)-3=" << c1 - 3 << " c_T(1,1/4)-sqrt5=" << c2 - std::sqrt(5.0);
        o.require(std::abs(c1 - 3.0) < 1e-12, "c_T(0, 3/4) = 3");
        o.require(std::abs(c2 - std::sqrt(5.0)) < 1e-12, "c_T(1, 1/4) = sqrt 5");
        o.require(unit_pair_at(spectrum(char_poly({c1, 0.75}, Branch::Low)), 2 * M_PI / 3, 1e-8), "pair at 2pi/3");
        o.require(unit_pair_at(spectrum(char_poly({c2, 1.25}, Branch::Low)), 2 * M_PI / 5, 1e-8), "pair at 2pi/5");
    });

    run(3, "rotation staircase", [&](Outcome& o) {
        const std::vector<std::pair<long, bool>> halves = {{0, true}, {1, false}, {1, true}, {2, false}, {2, true}};
        double prev = 1.0;
        long n = 3;
        for (auto [k, upper] : halves) {
            const double rho = torus_rho(k, upper);
            o.require(rho == 1.0 / static_cast<double>(n), "rho = 1/" + std::to_string(n));
            o.require(rho < prev, "strict decrease");
            // same value from the spectrum on the curve, mid-interval
            const double th = upper ? 0.7 : 0.3;
            const FloquetSpectrum sp = spectrum(char_poly({torus_c(k, upper, th), k + th}, Branch::Low));
            o.require(sp.crossing && std::abs(sp.crossing->rho - rho) < 1e-9, "spectrum crossing at 1/" + std::to_string(n));
            o.detail << " 1/" << n;
            prev = rho;
            n += 2;
        }
    });

    run(4, "fold criterion", [&](Outcome& o) {
        const double th = 0.36, cf = u_of(th);
        o.require(std::abs(cf - 0.22 * M_PI) < 1e-14, "u(0.36) = 0.22 pi");
        const OrbitProfile lo = build_orbit({0.695, th}, Branch::Low), hi = build_orbit({0.695, th}, Branch::High);
        o.require(lo.validity.valid && hi.validity.valid, "both orbits exist at c = 0.695");
        double gap = 0, same = 0;
        const OrbitProfile lf = build_orbit({cf, th}, Branch::Low), hf = build_orbit({cf, th}, Branch::High);
        for (int i = 0; i < 2000; ++i) {
            const double t = i / 2000.0;
            gap = std::max(gap, std::abs(lo.eval(t) - hi.eval(t)));
            same = std::max(same, std::abs(lf.eval(t) - hf.eval(t)));
        }
        o.require(gap > 1e-3, "distinct at c = 0.695");
        o.require(same < 1e-10, "coincide at c = u");
        double best = 1e9;
        for (auto r : spectrum(char_poly({cf, th}, Branch::Low)).roots) best = std::min(best, std::abs(r - 1.0));
        o.require(best < 1e-10, "root at +1");
        o.detail << " gap(0.695)=" << gap << " gap(fold)=" << same << " |root-1|=" << best;
    });

    // random valid LOW points shared by criteria 5 and 6
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> utau(0.05, 3.0), uc(0.05, 8.0);
    std::vector<std::pair<double, double>> pts;
    while (pts.size() < 50) {
        const double tau = utau(rng), c = uc(rng);
        if (near_half_multiple(tau, 1e-3)) continue;
        try {
            const OrbitProfile o = build_orbit({c, tau}, Branch::Low);
            if (o.validity.valid && !o.validity.degenerate) pts.emplace_back(tau, c);
        } catch (const Error&) {
        }
    }

    run(5, "orbit = solution", [&](Outcome& o) {
        double worst = 0, sym = 0;
        for (auto [tau, c] : pts) {
            const OrbitProfile orb = build_orbit({c, tau}, Branch::Low);
            const auto tr = solve_exact(orb.history(), orb.params, orb.alpha() + 3.0);
            for (int i = 0; i <= 3000; ++i) {
                const double t = orb.alpha() + 3.0 * i / 3000;
                worst = std::max(worst, std::abs(tr.eval(t) - orb.eval(t)));
            }
            sym = std::max(sym, orb.symmetry_residual());
        }
        o.detail << " sup error=" << worst << " symmetry residual=" << sym;
        o.require(worst < 1e-9, "sup error < 1e-9");
        o.require(sym < 1e-10, "symmetry residual < 1e-10");
    });

    run(6, "Floquet double entry", [&](Outcome& o) {
        double worst = 0;
        for (auto [tau, c] : pts) {
            const double g = power_iteration_check({c, tau}, Branch::Low, 6000);
            worst = std::max(worst, std::abs(g - spectrum(char_poly({c, tau}, Branch::Low)).max_modulus));
        }
        o.require(worst < 1e-6, "power iteration within 1e-6");
        int s_points = 0, real_above = 0;
        std::uniform_real_distribution<double> uth(0.01, 0.49), uc2(0.0, 4.0);
        while (s_points < 20) {
            const double th = uth(rng), c = uc2(rng);
            const long k = s_points % 3;
            const RegionVerdict v = region_S(th, c);
            if (!v.in_S || v.margin < 1e-3) continue;
            const OrbitProfile hi = build_orbit({c, k + th}, Branch::High);
            if (!hi.validity.valid || hi.validity.degenerate) continue;
            ++s_points;
            bool found = false;
            for (auto r : spectrum(char_poly({c, k + th}, Branch::High)).roots)
                found |= std::abs(r.imag()) < 1e-9 && r.real() > 1.0;
            real_above += found;
        }
        o.require(real_above == 20, "real root > 1 at all 20 S points");
        int stable = 0;
        for (long k = 0; k <= 4; ++k)
            for (double th : {0.2, 0.3, 0.7, 0.8})
                stable += spectrum(char_poly({100.0, k + th}, Branch::Low)).verdict == Verdict::Stable;
        o.require(stable == 20, "stable at c = 100");
        o.detail << " max |power - root|=" << worst << " S points with real root>1: " << real_above
                 << "/20, stable at c=100: " << stable << "/20";
    });

    run(7, "exact vs brute-force IVP", [&](Outcome& o) {
        const InitialFunction phi{0.0, ConstantSign{-1, 0.0}};
        for (double tau : {0.25, 0.76, 0.508, 0.42}) {
            const ModelParams p{1.0, tau};
            const auto ex = solve_exact(phi, p, 10.0);
            const auto bf = solve_bruteforce(phi, p, 10.0, 1e-5);
            double gap = 0;
            for (std::size_t i = 0; i < bf.h.size(); ++i) gap = std::max(gap, std::abs(bf.h[i] - ex.eval(bf.t0 + bf.dt * static_cast<double>(i))));
            o.detail << " gap(" << tau << ")=" << gap;
            o.require(gap < 1e-3, "gap < 1e-3 at tau=" + std::to_string(tau));
        }
        const auto p1 = detect_period(solve_exact(phi, {1.0, 0.25}, 60.0), 30.0);
        const auto p3 = detect_period(solve_exact(phi, {1.0, 0.76}, 60.0), 30.0);
        o.require(p1 && *p1 == 1, "period 1 at tau = 0.25");
        o.require(p3 && *p3 == 3, "period 3 at tau = 0.76");
        o.detail << " periods " << (p1 ? *p1 : 0) << "," << (p3 ? *p3 : 0);
    });

    run(8, "autonomous limit", [&](Outcome& o) {
        const auto tr = solve_exact(InitialFunction{0.0, ConstantSign{-1, 0.0}}, {0.0, 1.0}, 24.0);
        double lo = 1e9, hi = -1e9, per = 0;
        for (int i = 0; i <= 16000; ++i) {
            const double t = 8.0 + i * 1e-3;
            const double h = tr.eval(t);
            lo = std::min(lo, h);
            hi = std::max(hi, h);
            per = std::max(per, std::abs(h - tr.eval(t - 4.0)));
        }
        // exact extrema sit at odd integers
        for (int m = 9; m < 24; m += 2) {
            lo = std::min(lo, tr.eval(m));
            hi = std::max(hi, tr.eval(m));
        }
        o.detail << " max=" << hi << " min=" << lo << " period-4 residual=" << per;
        o.require(std::abs(hi - 1) < 1e-9 && std::abs(lo + 1) < 1e-9, "extrema +-1");
        o.require(per < 1e-9, "period 4");
    });

    run(9, "region double entry on a 200x200 grid", [&](Outcome& o) {
        const auto t0 = std::chrono::steady_clock::now();
        long checked = 0, mismatches = 0;
        for (int i = 0; i < 200; ++i) {
            const double th = i / 200.0;
            for (int j = 1; j <= 200; ++j) {
                const double c = 4.0 * j / 200;
                const ModelParams p{c, 1.0 + th};
                const RegionVerdict r = region_R(th, c);
                if (std::abs(r.margin) > 1e-6) {
                    ++checked;
                    bool pos = false;
                    try {
                        pos = build_orbit(p, Branch::Low).positivity.positive;
                    } catch (const Error& e) {
                        if (e.code() != ErrorCode::InsufficientForcing) throw;
                    }
                    mismatches += pos != r.in_R;
                }
                if (th > 0.0 && th < 0.5) {
                    const RegionVerdict s = region_S(th, c);
                    if (std::abs(s.margin) > 1e-6) {
                        ++checked;
                        bool pos = false;
                        try {
                            pos = build_orbit(p, Branch::High).positivity.positive;
                        } catch (const Error& e) {
                            if (e.code() != ErrorCode::InsufficientForcing) throw;
                        }
                        mismatches += pos != s.in_S;
                    }
                }
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.detail << " checked=" << checked << " mismatches=" << mismatches << " runtime=" << secs << "s";
        o.require(mismatches == 0, "no mismatches");
        o.require(secs < 120, "runtime < 120 s");
    });

    run(10, "smooth model alignment", [&](Outcome& o) {
        const auto t0 = std::chrono::steady_clock::now();
        const double target1 = 1.0 / std::sin(M_PI / 14) + 1.0;
        const double b1 = smooth_boundary_bisect(33, 1.75, target1 - 1.5, target1 + 1.5).c;
        const double b2 = smooth_boundary_bisect(11, 0.75, 1.5, 4.5).c;
        o.require(std::abs(b1 - target1) / target1 < 0.05, "kappa=33, tau=1.75 within 5%");
        o.require(std::abs(b2 - 3.0) / 3.0 < 0.10, "kappa=11, tau=0.75 within 10%");
        const double cT = torus_c(0, true, 0.8);
        double prev = 1e9;
        bool mono = true;
        o.detail << " c(33,1.75)=" << b1 << " c(11,0.75)=" << b2 << " gaps at 0.8:";
        for (double kappa : {11.0, 33.0, 100.0}) {
            const double gap = std::abs(smooth_boundary_bisect(kappa, 0.8, cT - 1.5, cT + 1.5).c - cT);
            o.detail << " " << gap;
            mono &= gap < prev;
            prev = gap;
        }
        o.require(mono, "gap decreasing in kappa");
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs <= 600, "runtime <= 10 min");
    });

    std::printf("%s: %d criterion(s) failed\n", failures ? "SUMMARY FAIL" : "SUMMARY PASS", failures);
    return failures ? 1 : 0;
}

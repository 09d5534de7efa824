#pragma once

// Floquet multipliers of the 1:1 orbits: characteristic polynomials, roots,
// and an independent check through the linearized zero-shift recurrences.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "psgzt/model.hpp"

namespace psgzt {

enum class Verdict { Stable, Unstable, Critical };
const char* to_string(Verdict v);

inline constexpr double kCriticalBand = 1e-9;

struct CharPoly {
    int degree = 0;
    std::vector<double> coeffs;  // ascending powers; coeffs[degree] == 1
    double hprime = 1.0;
    long k = 0;
    bool upper = false;  // theta in (1/2, 1)

    double eval(double x) const;
    std::complex<double> eval(std::complex<double> z) const;
};

CharPoly char_poly_from_hprime(long k, bool upper, double hprime);
// Refuses half-integer delays, missing orbits and orbits with degenerate zeros.
CharPoly char_poly(const ModelParams& p, Branch branch);

struct Crossing {
    double omega = 0.0;  // in (0, pi)
    double rho = 0.0;    // omega / 2pi
};

struct FloquetSpectrum {
    std::vector<std::complex<double>> roots;
    double max_modulus = 0.0;
    std::complex<double> dominant;
    std::optional<Crossing> crossing;
    Verdict verdict = Verdict::Stable;
    double max_residual = 0.0;

    // |arg| of the dominant multiplier over 2pi.
    double dominant_rho() const;
};

FloquetSpectrum spectrum(const CharPoly& poly);

// Lagged zero-shift deviations E at m + alpha (a) and m + alpha + 1/2 (b), newest first.
struct PerturbationState {
    std::vector<double> a;
    std::vector<double> b;
};

struct PowerIterationResult {
    double growth = 0.0;  // per-period growth of the deviation, dominant nontrivial mode
    long iterations = 0;
    double last_change = 0.0;
};

// One period of the linear recurrences (translation mode included).
PerturbationState advance(const PerturbationState& s, long k, bool upper, double hprime);

PowerIterationResult power_iteration(const ModelParams& p, Branch branch, long iterations,
                                     std::uint64_t seed = 12345);
double power_iteration_check(const ModelParams& p, Branch branch, long iterations,
                             std::uint64_t seed = 12345);

}  // namespace psgzt

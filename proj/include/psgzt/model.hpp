#pragma once

// Parameters, delay split and phase algebra for
//   h'(t) = -sign(h(t - tau)) + c cos(2 pi t).

#include <numbers>

namespace psgzt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kBoundaryBand = 1e-9;
inline constexpr double kTrigTol = 1e-12;

struct ModelParams {
    double c = 0.0;
    double tau = 1.0;
};

void validate(const ModelParams& p);

enum class HalfBranch { Zero, Lower, Half, Upper };
enum class Branch { Low, High };

const char* to_string(HalfBranch h);
const char* to_string(Branch b);

struct DelayDecomp {
    long k = 0;
    double theta = 0.0;
    HalfBranch half = HalfBranch::Zero;
    bool boundary = false;  // theta within kBoundaryBand of 0 or 1/2; values just below 1 roll over
};

DelayDecomp delay_decomp(double tau);

// True when tau is within kBoundaryBand of a multiple of 1/2.
bool is_half_integer(double tau);

// theta snapped onto {0, 1/4, 1/2, 3/4} when within kBoundaryBand, and onto 0 near 1.
double snap_theta(double theta);

double u_of(double theta);  // theta in [0, 1/2]
double v_of(double theta);  // theta in [1/2, 1]

// u on [0,1/2), v on [1/2,1); the right-hand side of the phase equation.
double phase_rhs(double theta);

// sin/cos of 2 pi t with the argument reduced mod 1 first.
double sin2pi(double t);
double cos2pi(double t);

struct PhaseSolution {
    double alpha = 0.0;  // representative in (-1/2, 1/2]
    Branch branch = Branch::Low;
    double sin2pa = 0.0;
    double cos2pa = 1.0;
    double hprime_alpha = 1.0;
    bool one_sided = false;  // theta in {0, 1/2}: right-hand slope
    bool fold = false;       // c^2 == u^2 (resp. v^2)
    double theta = 0.0;      // snapped theta used
};

PhaseSolution solve_phase(const ModelParams& p, Branch branch);

// Wrap to (-1/2, 1/2].
double wrap_half(double x);

}  // namespace psgzt

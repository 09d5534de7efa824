#pragma once

// Closed-form bifurcation curves, the composite stability boundary and grid sweeps.

#include <optional>
#include <string>
#include <vector>

#include "psgzt/model.hpp"

namespace psgzt {

enum class CurveId { T, SN, BC_minus, BC_plus, Bj, SIGNUM_T, JOIN };
const char* to_string(CurveId id);

struct CurveSample {
    CurveId id = CurveId::T;
    double tau = 0.0;
    double c = 0.0;
    std::optional<double> rho;
    std::optional<int> j;
    long k = 0;
    bool upper = false;
};

// Slope h'(alpha) on the torus curve with index k.
double torus_hprime(long k, bool upper);
double torus_rho(long k, bool upper);
// c on curve T at theta strictly inside the half-interval.
double torus_c(long k, bool upper, double theta);
std::vector<CurveSample> torus_curve_T(long k, bool upper, const std::vector<double>& theta_grid);

std::vector<CurveSample> sn_curve(const std::vector<double>& theta_grid);
// BC_minus on (0, 1/2 - theta_hat) and (theta_hat, 1/2); BC_plus on [1/2 - theta_hat, theta_hat].
std::vector<CurveSample> bc_curves(const std::vector<double>& theta_grid);

struct JBranch {
    long k = 0;
    bool upper = false;
    int j = 1;
    double hprime = 0.0;
    double omega = 0.0;  // 2 j pi / (4k+1) or / (4k+3)

    double c_of(double theta) const;
    CurveSample sample(double theta) const;
};

std::vector<int> valid_j(long k, bool upper);
JBranch general_j_branch(long k, bool upper, int j);
// Valid j != 1 with the largest h'(alpha); empty when no such j.
std::optional<JBranch> secondary_branch(long k, bool upper);

CurveSample signum_forced_boundary(long k, bool upper);

// Composite boundary B sampled at tau_grid, plus paired JOIN samples at every multiple
// of 1/2 strictly inside the grid range. Sorted by tau.
std::vector<CurveSample> stability_boundary_B(const std::vector<double>& tau_grid);
// Value of B at tau, or nullopt at multiples of 1/2.
std::optional<CurveSample> boundary_at(double tau);

// Open grid on (lo, hi) with 1e-6 end insets.
std::vector<double> open_grid(double lo, double hi, int n);

struct GridAxis {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    std::vector<double> values() const;  // inclusive linspace
};

struct SweepRow {
    double tau = 0.0;
    double c = 0.0;
    bool in_R = false;
    bool in_S = false;
    std::string verdict;  // STABLE/UNSTABLE/CRITICAL or NO_ORBIT/HALF_INTEGER/DEGENERATE/ERROR
    double max_modulus = 0.0;
    double rho = 0.0;
    std::string error;
};

// Deterministic row order (tau major, then c) regardless of threads.
std::vector<SweepRow> sweep(const GridAxis& tau, const GridAxis& c, unsigned threads = 0);
SweepRow sweep_point(double tau, double c);
// Thread cap from PSGZT_THREADS (0 when unset).
unsigned env_thread_cap();

}  // namespace psgzt

#pragma once

// Symmetric 1:1-periodic orbits in closed form and their existence regions.

#include <optional>
#include <string>
#include <vector>

#include "psgzt/ivp.hpp"
#include "psgzt/model.hpp"

namespace psgzt {

enum class Subregion { Plain, II, I, III };
const char* to_string(Subregion s);

enum class Binding {
    HalfIntegerClause,  // theta in {0, 1/2}: c^2 >= pi^2/4 + 1
    QuarterClause,      // theta = 1/4: c^2 > 0
    WMinus,             // c^2 >= w_-^2
    USquared,           // c^2 >= u^2 (also the lower edge of S)
    UpperClause,        // theta in (1/2,1)
    WPlus,              // c^2 <= w_+^2
    OutsideDomain,      // S is empty at this theta
};
const char* to_string(Binding b);

struct RegionVerdict {
    bool in_R = false;
    bool in_S = false;
    Binding binding = Binding::USquared;
    double margin = 0.0;  // signed distance in c^2, >= 0 inside
};

// p(t) = p_start + s (t - t_start) on [t_start, t_end).
struct ProfilePiece {
    double t_start = 0.0;
    double t_end = 0.0;
    int s = 1;
    double p_start = 0.0;
};

struct OrbitShape {
    std::optional<double> t1, t2;
    std::optional<double> h_at_t2;
    Subregion subregion = Subregion::Plain;
};

struct PositivityReport {
    double min_h = 0.0;           // min over samples in (alpha, alpha + 1/2)
    bool positive = false;        // min_h >= -1e-10
    bool degenerate = false;      // some interior critical point or kink with |h| <= 1e-10
    std::vector<double> touching;  // locations of such points
};

struct OrbitValidity {
    bool valid = false;
    bool degenerate = false;
    std::string reason;
};

class OrbitProfile {
public:
    ModelParams params;
    DelayDecomp decomp;
    PhaseSolution phase;
    std::vector<ProfilePiece> pieces;  // one period starting at alpha
    OrbitValidity validity;
    OrbitShape shape;
    RegionVerdict region;
    PositivityReport positivity;

    double alpha() const { return phase.alpha; }
    double p(double t) const;  // periodic
    double eval(double t) const;
    // Restriction to [t0 - tau, t0] as segment history; t0 defaults to alpha.
    InitialFunction history(std::optional<double> t0 = std::nullopt) const;
    // max |h(t) + h(t + 1/2)| over n uniform samples of one period
    double symmetry_residual(int n = 1000) const;
};

// Profile pieces and phase only; no validity decision.
OrbitProfile construct_profile(const ModelParams& p, Branch branch);
PositivityReport check_positivity(const OrbitProfile& orbit, int uniform_samples = 1000);

// Full construction: pieces, region verdict, positivity and consistency between them.
// Throws InternalInconsistency when the two disagree with |margin| > 1e-8.
OrbitProfile build_orbit(const ModelParams& p, Branch branch);

double theta_hat();
double w_minus_sq(double theta);  // theta in [theta_hat, 1/2]
double w_plus_sq(double theta);   // theta in [1/4, theta_hat]
double W_minus(double theta, double c);
double W_plus(double theta, double c);

// Lower boundary of R on (1/2, 1).
double upper_clause_sq(double theta);
// Right-hand side bound defining region II.
double region_II_bound_sq(double theta);

RegionVerdict region_R(double theta, double c);
RegionVerdict region_S(double theta, double c);
RegionVerdict region_verdict(double theta, double c);  // both

Subregion classify_subregion(double theta, double c);  // theta in (0, 1/2)
Subregion classify_any(double theta, double c);         // theta in [0, 1)

}  // namespace psgzt

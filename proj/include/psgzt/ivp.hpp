#pragma once

// Exact event-driven solution of the initial value problem
//   h'(t) = -sign(h(t - tau)) + c cos(2 pi t),  h(t) = phi(t - t0) on [t0 - tau, t0],
// together with a brute-force fixed-step integrator used as an oracle.

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "psgzt/model.hpp"

namespace psgzt {

enum class Direction { Up, Down };
const char* to_string(Direction d);

struct Zero {
    double z = 0.0;
    Direction dir = Direction::Up;
    bool degenerate = false;
};

// h(t) = A + s t + (c/2pi) sin(2 pi t) on [t_start, t_end].
// Evaluation is anchored at t_start (h_start) for accuracy; A is kept for export.
struct Segment {
    double t_start = 0.0;
    double t_end = 0.0;
    int s = 1;
    double h_start = 0.0;
    double A = 0.0;

    double eval(double t, double c) const;
};

Segment make_segment(double t_start, double t_end, int s, double h_start, double c);

// Initial data forms. Times inside ConstantSign/PiecewiseLinear are relative (s in [-tau, 0]);
// SegmentHistory uses absolute times on [t0 - tau, t0].
struct ConstantSign {
    int sign = -1;
    double value_at_0 = 0.0;  // phi(s) = value_at_0 - sign * s
};

struct PiecewiseLinear {
    std::vector<std::pair<double, double>> breakpoints;  // (s, phi(s)), s from -tau to 0
    std::vector<double> zeros;                            // declared sign changes in (-tau, 0)
};

struct SegmentHistory {
    std::vector<Segment> segments;  // abutting, covering [t0 - tau, t0]
    std::vector<double> zeros;      // nondegenerate zeros strictly inside (t0 - tau, t0)
    int sign_at_start = 1;          // sign of h just after t0 - tau
};

struct InitialFunction {
    double t0 = 0.0;
    std::variant<ConstantSign, PiecewiseLinear, SegmentHistory> form = ConstantSign{};
};

// Sign structure of phi on (t0 - tau, t0): initial sign and absolute sign-change times.
struct SignPattern {
    int initial_sign = 1;
    std::vector<double> zeros;
    double value_at_t0 = 0.0;
    int sign_before_t0 = 1;
};

SignPattern sign_pattern(const InitialFunction& phi, const ModelParams& p);
double eval_initial(const InitialFunction& phi, const ModelParams& p, double t);

class PiecewiseTrajectory {
public:
    ModelParams params;
    InitialFunction phi;
    std::vector<Segment> segments;
    std::vector<Zero> zeros;  // zeros found for t >= t0, in order

    double t0() const { return phi.t0; }
    double t_end() const { return segments.empty() ? phi.t0 : segments.back().t_end; }
    // Valid on [t0 - tau, t_end].
    double eval(double t) const;
    std::size_t segment_index(double t) const;
    std::vector<double> nondegenerate_zeros() const;
};

struct ExactOptions {
    bool require_nondegenerate_start = false;
    double accumulation_gap = 1e-6;
};

PiecewiseTrajectory solve_exact(const InitialFunction& phi, const ModelParams& p, double t_end,
                                const ExactOptions& opts = {});

// History of traj on [T - tau, T] in segment form, for restarting at T.
InitialFunction history_at(const PiecewiseTrajectory& traj, double T);

struct SampledTrajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> h;  // h[i] = h(t0 + i dt)

    double t_end() const { return t0 + dt * static_cast<double>(h.size() - 1); }
    double eval(double t) const;  // linear interpolation, t in [t0, t_end]
};

SampledTrajectory solve_bruteforce(const InitialFunction& phi, const ModelParams& p, double t_end,
                                   double dt);

// Smallest n <= 8 with |h(t*+m+n) - h(t*+m)| < tol for all sampled m, t* = t0 + transient.
std::optional<int> detect_period(const PiecewiseTrajectory& traj, double transient,
                                 double tol = 1e-6);

}  // namespace psgzt

#pragma once

// Smooth tanh model h'(t) = -tanh(kappa h(t - tau)) + c cos(2 pi t), used as a numerical oracle.

#include <functional>
#include <vector>

#include "psgzt/ivp.hpp"

namespace psgzt {

struct SmoothParams {
    double kappa = 1.0;
    double c = 0.0;
    double tau = 1.0;
    void validate() const;
};

using HistoryFn = std::function<double(double)>;  // defined on [-tau, 0]

// RK4 with the delayed value taken from 4-point cubic Lagrange interpolation on the stored
// grid (interpolation error O(dt^4)). Requires dt <= min(1e-3, tau/20). Starts at t = 0.
SampledTrajectory integrate_smooth(const SmoothParams& p, const HistoryFn& history, double t_end,
                                   double dt);

double default_smooth_dt(double tau);

// History seed: the exact psGZT orbit when it is valid at (tau, c), else a constant plus ramp.
HistoryFn seed_history(const SmoothParams& p);

struct ClassifyOptions {
    double transient = 100.0;  // periods
    double horizon = 300.0;    // periods after the transient
    double tol = 1e-6;
    double dt = 0.0;           // 0: default_smooth_dt
    bool contraction = true;   // also accept steady geometric contraction of the drift
};

struct Period1Result {
    bool stable = false;
    double drift = 0.0;   // max |h(t+1) - h(t)| over the final period
    double ratio = 1.0;   // per-period contraction factor over the final window
};

Period1Result classify_period1(const SmoothParams& p, const ClassifyOptions& opt = {});

struct BoundaryEstimate {
    double c = 0.0;
    double c_lo = 0.0, c_hi = 0.0;
    double horizon = 0.0;
    int evaluations = 0;
};

// Bisection on c until c_hi - c_lo <= dc. c_lo must classify unstable, c_hi stable.
BoundaryEstimate smooth_boundary_bisect(double kappa, double tau, double c_lo, double c_hi,
                                        const ClassifyOptions& opt = {}, double dc = 1e-3);

struct RotationEstimate {
    double rho = 0.0;
    double stderr_ = 0.0;
    int iterates = 0;
};

// Mean turning angle of successive stroboscopic differences in the (h(n), h(n - tau)) plane.
// Throws NotOscillatory when they decay monotonically.
RotationEstimate smooth_rotation_estimate(const SmoothParams& p, int iterates = 400,
                                          double transient = 200.0, double dt = 0.0);

}  // namespace psgzt

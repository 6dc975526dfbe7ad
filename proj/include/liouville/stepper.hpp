#pragma once

#include <functional>

#include "liouville/linalg.hpp"

namespace liouville {

using Rhs = std::function<void(double t, const Vec& y, Vec& dy)>;

enum class StepFlow { proceed, stop };

/// Called after every accepted step with the new state and its derivative
/// (the FSAL stage, so no extra evaluation).
using StepObserver = std::function<StepFlow(double t, const Vec& y, const Vec& dy)>;

struct StepperOptions {
    double tol = 1e-10;     // absolute local-error tolerance per component
    double rtol = 0.0;      // optional relative contribution to the error weight
    double h_max = 1.0;
    double h_init = 0.0;    // 0 -> auto
    long max_steps = 2000000;
    const Vec* checkpoints = nullptr; // sorted t values the grid must hit exactly
};

/// Adaptive Dormand-Prince 5(4) driver from t0 to t_end (t_end > t0).
/// The observer sees every accepted step; integration stops early when it
/// returns StepFlow::stop. Throws StepUnderflow when the controller stalls.
void integrate_dp45(const Rhs& rhs, double t0, const Vec& y0, double t_end,
                    const StepperOptions& opt, const StepObserver& observer);

// Two-point quintic Hermite on [0,1]: values, first and second derivatives at
// both ends (end derivatives given with respect to the unit variable).
double hermite5(double th, double f0, double d0, double s0, double f1, double d1, double s1);
double hermite5_d1(double th, double f0, double d0, double s0, double f1, double d1, double s1);
double hermite5_d2(double th, double f0, double d0, double s0, double f1, double d1, double s1);

} // namespace liouville

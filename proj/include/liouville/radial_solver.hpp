#pragma once

#include "liouville/profile.hpp"

namespace liouville {

/// A fully validated problem instance plus solver tolerances.
struct ProblemSpec {
    CouplingMatrix a;
    SingularityExponents beta;
    double tol_step = 1e-10;   // local truncation tolerance
    double tol_energy = 1e-9;  // quadrature / tail tolerance
    double t_min = -18.0;      // log-radius window
    double t_max = 60.0;
    double start_scale = 1.0;  // multiplies the auto-selected start radius

    int n() const { return a.n; }
};

/// Validates (H1), the beta bounds and the tolerance ranges; throws the
/// corresponding algebra errors or ValidationError.
ProblemSpec make_problem_spec(const Mat& a_raw, const Vec& beta, double tol_step = 1e-10,
                              double tol_energy = 1e-9, double t_min = -18.0,
                              double t_max = 60.0);

struct InitialHeights {
    Vec c; // u_i(0)
};

struct PicardLocal {
    Vec u;    // u_i(r0)
    Vec rdu;  // r u_i'(r0)
    double error_bound;
    double contraction;
};

/// Values at a small radius r0 from the contraction iteration about the
/// origin. Throws R0TooLarge when the contraction estimate cannot certify
/// tol_step.
PicardLocal picard_local(const ProblemSpec& spec, const InitialHeights& c, double r0);

/// Integrates the system u_i'' + sum_j a_ij e^((2+beta_j) t + u_j) = 0 in
/// t = log r from a series start near the origin, with adaptive embedded
/// RK 5(4) stepping. Stops once every slope satisfies
/// du_i <= -(2+beta_i) - delta_stop with tail energy below tol_energy, or at
/// t_max (converged = false; expected when some a_ii = 0). Energies and
/// log-moments are carried as quadrature state, so sigma, m and the intercept
/// diagnostics come out of the same error-controlled pass.
RadialProfile integrate(const ProblemSpec& spec, const InitialHeights& c);

struct EnergyComputation {
    EnergyVector sigma;     // grid quadrature + analytic tail
    Vec tail;               // per-component tail contribution
    Vec cross_residual;     // A sigma - m
};

/// Re-quadrature of r^(1+beta_i) e^(u_i) from the stored profile (independent
/// of the quadrature carried during integration), cross-checked against
/// sigma = A^{-1} m. Requires a converged profile; throws TailDominates when
/// the tail estimate exceeds 10 x tol_energy.
EnergyComputation compute_energy(const RadialProfile& profile, const ProblemSpec& spec);

/// Max defect of the stored profile against the differential equation,
/// estimated at interval midpoints.
double residual(const RadialProfile& profile, const ProblemSpec& spec);

} // namespace liouville

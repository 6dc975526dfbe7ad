#pragma once

#include <utility>
#include <vector>

#include "liouville/algebra.hpp"

namespace liouville {

struct ProfileDiagnostics {
    double lambda_i_residual = 0.0; // Lambda_I(sigma), should vanish for solutions
    std::vector<std::pair<std::vector<int>, double>> lambda_js; // proper subsets, 0-based
    Vec tail_energy;            // per-component tail estimate at the last grid point
    Vec head_sigma;             // energy carried by (0, r0]
    Vec log_moment;             // Int_0^inf log(r) r^(1+beta_i) e^(u_i) dr
    Vec c_const_integral;       // intercept via the integral identity (cross-check)
    Vec energy_cross_residual;  // A sigma - m
    double tail_exponent_estimate = 0.0;
    double contraction = 0.0;       // Picard contraction parameter at the start point
    double start_error_bound = 0.0; // certified series-start error
    long steps = 0;
};

/// A radial solution sampled on a strictly increasing log-radius grid,
/// together with its energies and asymptotic data. u holds
/// u_i(e^t), du holds r u_i'(r) = d/dt u_i(e^t).
struct RadialProfile {
    CouplingMatrix coupling;
    SingularityExponents beta;
    Vec c0; // initial heights u_i(0)

    Vec grid;
    std::vector<Vec> u;  // [component][grid point]
    std::vector<Vec> du;

    EnergyVector sigma;
    Vec m;       // asymptotic slopes, -lim r u_i'
    Vec c_const; // asymptotic intercepts
    bool converged = false;
    double tol_step = 1e-10;  // tolerances the profile was produced with
    double tol_energy = 1e-9;
    ProfileDiagnostics diag;

    int n() const { return coupling.n; }
    size_t points() const { return grid.size(); }
    double t_front() const { return grid.front(); }
    double t_back() const { return grid.back(); }

    /// u_i''(t) from the differential equation at grid point k.
    double curvature(int i, size_t k) const;

    /// r^(2+beta_i) e^(u_i) at grid point k.
    double weight(int i, size_t k) const;

    /// Quintic-Hermite sampling inside the grid; asymptotic extension past the
    /// last point; contraction of u towards c0 before the first point.
    double sample_u(int i, double t) const;
    double sample_du(int i, double t) const;

    /// Index of the interval [grid[k], grid[k+1]] containing t (clamped).
    size_t locate(double t) const;
};

/// Profile of v_i(r) = u_i(delta r) + (2+beta_i) log delta. Energies and
/// slopes are carried over exactly; no re-quadrature happens.
RadialProfile scale_profile(const RadialProfile& p, double delta);

/// Max over interval midpoints and components of
/// |u_i'' + sum_j a_ij r^(2+beta_j) e^(u_j)| with u interpolated from the
/// stored grid data. An a-posteriori defect measure for any profile.
double residual_max_defect(const RadialProfile& p);

} // namespace liouville

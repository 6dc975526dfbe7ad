#pragma once

#include "liouville/radial_solver.hpp"

namespace liouville {

/// Solution of the linearized system along a converged radial profile at
/// Fourier mode k. Mode k >= 1 is integrated in the scaled variable
/// chi = r^(-k) phi (regular branch), so the stored phi values follow
/// leading_i r^k near the origin exactly. The grid is shared with the base.
struct LinearizedProfile {
    int mode = 0;
    Vec grid;
    std::vector<Vec> phi;   // [component][grid point]
    std::vector<Vec> dphi;  // r phi' = d/dt phi
    Vec alpha;              // phi_i(0) for k = 0; leading r^k coefficients for k >= 1
    Vec moments;            // Int_0^{t_end} r^(2+beta_i) e^(u_i) phi_i dt, head included
    Vec tail_moments;       // analytic continuation beyond t_end
    std::vector<Vec> partial_moments; // running moment at each grid point
    double envelope_factor = 1.0;     // k >= 1: growth against r^k (1+r)^(-2k)
    bool envelope_bounded = true;
    double growth_bound_c = 0.0;      // k = 0: max |phi| / (1 + |t|)
};

/// Mode-0 solve with phi_i(0) = alpha_i, r phi_i'(0) = 0.
LinearizedProfile solve_mode0(const RadialProfile& base, const Vec& alpha);

/// Mode k >= 1 with regular behavior phi_i ~ leading_i r^k near the origin
/// (two-term series start). Classifies boundedness against the
/// r^k (1+r)^(-2k) envelope: violation factor >= 1e3 flags unbounded.
LinearizedProfile solve_mode_k(const RadialProfile& base, int k, const Vec& leading);

/// For the scaling-direction solution (alpha = 2+beta): checks
/// Int_0^r s^(1+beta_i) e^(u_i) phi_i ds = r^(2+beta_i) e^(u_i(r)) at every
/// grid point. Returns the max residual relative to the peak weight.
double kernel_partial_integral_check(const RadialProfile& base, const LinearizedProfile& phi0);

/// Max defect of the stored mode-k profile against its differential equation,
/// estimated at interval midpoints.
double mode_residual(const RadialProfile& base, const LinearizedProfile& lp);

struct JacobianResult {
    Mat m;                        // (n-1)x(n-1), entries d sigma_i / d c_m
    std::vector<Vec> sensitivity; // n rows x (n-1) columns (includes row n)
    double smallest_singular_value = 1.0;
    double condition = 1.0;
};

/// Sensitivity of the energies to the initial heights (last height pinned to
/// fix the scaling freedom): solves n-1 mode-0 systems with unit initial
/// data. Throws BaseNotConverged when integrate(spec, c) fails to converge.
JacobianResult variational_jacobian(const ProblemSpec& spec, const InitialHeights& c);
JacobianResult variational_jacobian(const ProblemSpec& spec, const RadialProfile& base);

struct ComparisonReport {
    bool f_positive = false;       // f_i = -u_i' > 0 at every grid point
    bool margin_negative = false;  // operator applied to f is negative everywhere
    double worst_margin = 0.0;     // max over grid (must stay < 0)
    double min_f = 0.0;
    bool diverges_at_zero = false;     // f_i / r^k -> inf as r -> 0
    bool diverges_at_infinity = false; // f_i r^k -> inf as r -> inf
    bool all_ok() const {
        return f_positive && margin_negative && diverges_at_zero && diverges_at_infinity;
    }
};

/// Sign conditions making f_i = -u_i' a comparison function for mode k >= 2
/// when every beta_i < 0. Throws BetaNotNegative / InvalidMode on violated
/// preconditions.
ComparisonReport comparison_function_check(const RadialProfile& base, int k);

} // namespace liouville

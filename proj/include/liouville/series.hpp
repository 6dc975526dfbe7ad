#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "liouville/algebra.hpp"

namespace liouville {

/// Truncated generalized power series in the exponent monoid generated by
/// g_j = 2 + beta_j: terms c * r^(sum_j m_j g_j) keyed by the multi-index m.
/// Working with multi-indices keeps exponent arithmetic exact, so equal
/// exponents merge instead of proliferating.
struct Series {
    std::map<std::vector<std::uint8_t>, double> terms;
};

/// Picard expansion of the radial system about r = 0, on (0, r0].
///
/// The integral form u_i(r) = c_i - sum_j a_ij Int_0^r s^(1+beta_j)
/// log(r/s) e^(u_j(s)) ds contracts once
///   eps = max_i sum_j a_ij e^(c_j) r0^(g_j) / g_j^2
/// is small; each iteration is evaluated exactly on the truncated series, so
/// the returned values carry a certified error bound (contraction tail plus
/// exponential-truncation term).
class SingularStart {
public:
    SingularStart(const CouplingMatrix& a, const SingularityExponents& beta, const Vec& c,
                  double r0, int iterations = 4);

    double r0() const { return r0_; }
    double contraction() const { return eps_; }
    double error_bound() const { return err_; }

    Vec u_at_r0() const;    // u_i(r0)
    Vec dudt_at_r0() const; // d/dt u_i(e^t) at t = log r0  (= r u_i'(r0))

    /// Int_0^{r0} s^(1+beta_i) e^(u_i) ds per component.
    Vec head_sigma() const;
    /// Int_0^{r0} log(s) s^(1+beta_i) e^(u_i) ds per component.
    Vec head_logmoment() const;

    /// Start data for the linearized system at Fourier mode k, in the scaled
    /// variable chi = r^(-k) phi. `init` is phi_i(0) for k = 0 or the leading
    /// r^k coefficients for k >= 1.
    struct LinearInit {
        Vec chi;         // chi_i(r0)
        Vec dchi;        // d/dt chi_i at t = log r0
        Vec head_moment; // Int_0^{r0} s^(1+beta_i) e^(u_i) phi_i ds
        double error_bound;
    };
    LinearInit linear_start(int k, const Vec& init, int iterations = 4) const;

    /// Largest r0 with contraction parameter <= eps_target (also <= r_cap).
    static double pick_r0(const CouplingMatrix& a, const SingularityExponents& beta,
                          const Vec& c, double eps_target, double r_cap);

private:
    double exponent(const std::vector<std::uint8_t>& mi) const;
    double pow_r0(double gamma) const;
    double eval(const Series& s, bool absolute = false) const;
    double eval_deriv(const Series& s) const;
    Series cull(const Series& s, double floor_at_r0) const;
    Series mul(const Series& a, const Series& b, double floor_at_r0) const;
    Series exp3(const Series& v) const; // 1 + v + v^2/2 + v^3/6
    // L_{j,k}[r^gamma] = r^(gamma+g_j) / ((gamma+g_j)(gamma+g_j+2k))
    Series kernel_apply(const Series& s, int j, int k) const;

    int n_;
    const CouplingMatrix* a_;
    Vec g_;   // 2 + beta_j
    Vec c_;
    Vec ec_;  // e^(c_j)
    double r0_, log_r0_;
    double eps_ = 0.0, err_ = 0.0;
    std::vector<Series> v_;    // u_i - c_i
    std::vector<Series> expv_; // exp3(v_i), cached
};

} // namespace liouville

#include "liouville/profile.hpp"

#include <algorithm>
#include <cmath>

#include "liouville/stepper.hpp"

namespace liouville {

namespace {

// d/dt of u_i'' along the trajectory: -sum_j a_ij E_j (2+beta_j + du_j).
double curvature_rate(const RadialProfile& p, int i, size_t k) {
    double s = 0.0;
    for (int j = 0; j < p.n(); ++j) {
        const double aij = p.coupling.entries(i, j);
        if (aij == 0.0) continue;
        s -= aij * p.weight(j, k) * ((p.beta.beta[j] + 2.0) + p.du[j][k]);
    }
    return s;
}

} // namespace

double RadialProfile::curvature(int i, size_t k) const {
    double s = 0.0;
    for (int j = 0; j < n(); ++j) {
        const double aij = coupling.entries(i, j);
        if (aij == 0.0) continue;
        s -= aij * weight(j, k);
    }
    return s;
}

double RadialProfile::weight(int i, size_t k) const {
    return std::exp((beta.beta[i] + 2.0) * grid[k] + u[i][k]);
}

size_t RadialProfile::locate(double t) const {
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    size_t k = (it == grid.begin()) ? 0 : static_cast<size_t>(it - grid.begin()) - 1;
    return std::min(k, grid.size() - 2);
}

double RadialProfile::sample_u(int i, double t) const {
    if (t <= t_front()) {
        // Between r = 0 and the first grid point u relaxes to c0 with
        // derivative matching at the boundary.
        const double d = u[i][0] - c0[i];
        if (std::fabs(d) < 1e-300) return c0[i];
        const double rate = du[i][0] / d;
        return c0[i] + d * std::exp(rate * (t - t_front()));
    }
    if (t >= t_back()) {
        const size_t e = grid.size() - 1;
        const double dt = t - t_back();
        if (!converged || m.empty()) return u[i][e] + du[i][e] * dt;
        double val = u[i][e] - m[i] * dt;
        for (int j = 0; j < n(); ++j) {
            const double aij = coupling.entries(i, j);
            if (aij == 0.0 || diag.tail_energy.empty()) continue;
            const double lam = m[j] - (beta.beta[j] + 2.0);
            if (lam <= 0.0) continue;
            val += aij * diag.tail_energy[j] / lam * (1.0 - std::exp(-lam * dt));
        }
        return val;
    }
    const size_t k = locate(t);
    const double h = grid[k + 1] - grid[k];
    const double th = (t - grid[k]) / h;
    return hermite5(th, u[i][k], du[i][k] * h, curvature(i, k) * h * h, u[i][k + 1],
                    du[i][k + 1] * h, curvature(i, k + 1) * h * h);
}

double RadialProfile::sample_du(int i, double t) const {
    if (t <= t_front()) {
        const double d = u[i][0] - c0[i];
        if (std::fabs(d) < 1e-300) return 0.0;
        const double rate = du[i][0] / d;
        return du[i][0] * std::exp(rate * (t - t_front()));
    }
    if (t >= t_back()) {
        const size_t e = grid.size() - 1;
        if (!converged || m.empty()) return du[i][e];
        double val = -m[i];
        for (int j = 0; j < n(); ++j) {
            const double aij = coupling.entries(i, j);
            if (aij == 0.0 || diag.tail_energy.empty()) continue;
            const double lam = m[j] - (beta.beta[j] + 2.0);
            if (lam <= 0.0) continue;
            val += aij * diag.tail_energy[j] * std::exp(-lam * (t - t_back()));
        }
        return val;
    }
    const size_t k = locate(t);
    const double h = grid[k + 1] - grid[k];
    const double th = (t - grid[k]) / h;
    return hermite5(th, du[i][k], curvature(i, k) * h,
                    curvature_rate(*this, i, k) * h * h, du[i][k + 1], curvature(i, k + 1) * h,
                    curvature_rate(*this, i, k + 1) * h * h);
}

RadialProfile scale_profile(const RadialProfile& p, double delta) {
    const double l = std::log(delta);
    RadialProfile q = p;
    const int n = p.n();
    for (size_t k = 0; k < p.grid.size(); ++k) q.grid[k] = p.grid[k] - l;
    for (int i = 0; i < n; ++i) {
        const double shift = (p.beta.beta[i] + 2.0) * l;
        for (size_t k = 0; k < p.grid.size(); ++k) q.u[i][k] = p.u[i][k] + shift;
        q.c0[i] = p.c0[i] + shift;
        if (!q.c_const.empty())
            q.c_const[i] = p.c_const[i] - (p.m[i] - (p.beta.beta[i] + 2.0)) * l;
        if (!q.diag.log_moment.empty())
            q.diag.log_moment[i] = p.diag.log_moment[i] - l * p.sigma.sigma[i];
        if (!q.diag.c_const_integral.empty())
            q.diag.c_const_integral[i] =
                p.diag.c_const_integral[i] - (p.m[i] - (p.beta.beta[i] + 2.0)) * l;
    }
    return q;
}

double residual_max_defect(const RadialProfile& p) {
    const int n = p.n();
    double worst = 0.0;
    Vec umid(n);
    for (size_t k = 0; k + 1 < p.grid.size(); ++k) {
        const double h = p.grid[k + 1] - p.grid[k];
        const double tm = p.grid[k] + 0.5 * h;
        for (int i = 0; i < n; ++i)
            umid[i] = hermite5(0.5, p.u[i][k], p.du[i][k] * h, p.curvature(i, k) * h * h,
                               p.u[i][k + 1], p.du[i][k + 1] * h,
                               p.curvature(i, k + 1) * h * h);
        for (int i = 0; i < n; ++i) {
            const double upp =
                hermite5_d2(0.5, p.u[i][k], p.du[i][k] * h, p.curvature(i, k) * h * h,
                            p.u[i][k + 1], p.du[i][k + 1] * h, p.curvature(i, k + 1) * h * h) /
                (h * h);
            double rhs = 0.0;
            for (int j = 0; j < n; ++j) {
                const double aij = p.coupling.entries(i, j);
                if (aij == 0.0) continue;
                rhs += aij * std::exp((p.beta.beta[j] + 2.0) * tm + umid[j]);
            }
            worst = std::max(worst, std::fabs(upp + rhs));
        }
    }
    return worst;
}

} // namespace liouville

#include "liouville/radial_solver.hpp"

#include <algorithm>
#include <cmath>

#include "liouville/errors.hpp"
#include "liouville/series.hpp"
#include "liouville/stepper.hpp"

namespace liouville {

namespace {

constexpr double kEpsStart = 1e-4;  // contraction bound for the series start
constexpr double kExpGuard = 600.0; // abort before e^x overflows

// Five-point Gauss-Legendre on [0,1].
constexpr double kGx[5] = {0.046910077030668, 0.230765344947158, 0.5, 0.769234655052841,
                           0.953089922969332};
constexpr double kGw[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                           0.239314335249683, 0.118463442528095};

} // namespace

ProblemSpec make_problem_spec(const Mat& a_raw, const Vec& beta, double tol_step,
                              double tol_energy, double t_min, double t_max) {
    ProblemSpec spec;
    spec.a = validate_matrix(a_raw);
    if (static_cast<int>(beta.size()) != spec.a.n)
        throw ValidationError("beta length does not match the coupling matrix size");
    spec.beta = validate_beta(beta);
    if (!(tol_step > 0.0 && tol_step <= 1e-2))
        throw ValidationError("tol_step must lie in (0, 1e-2]");
    if (!(tol_energy > 0.0 && tol_energy <= 1e-2))
        throw ValidationError("tol_energy must lie in (0, 1e-2]");
    if (!(t_min < t_max)) throw ValidationError("window must satisfy t_min < t_max");
    spec.tol_step = tol_step;
    spec.tol_energy = tol_energy;
    spec.t_min = t_min;
    spec.t_max = t_max;
    return spec;
}

PicardLocal picard_local(const ProblemSpec& spec, const InitialHeights& c, double r0) {
    if (!(r0 > 0.0)) throw ValidationError("r0 must be positive");
    SingularStart start(spec.a, spec.beta, c.c, r0, 4);
    if (start.contraction() > 0.05 || start.error_bound() > spec.tol_step)
        throw R0TooLarge("contraction parameter " + std::to_string(start.contraction()) +
                         ", certified error " + std::to_string(start.error_bound()) +
                         " exceeds tol_step");
    PicardLocal out;
    out.u = start.u_at_r0();
    out.rdu = start.dudt_at_r0();
    out.error_bound = start.error_bound();
    out.contraction = start.contraction();
    return out;
}

RadialProfile integrate(const ProblemSpec& spec, const InitialHeights& c) {
    const int n = spec.n();
    if (static_cast<int>(c.c.size()) != n)
        throw ValidationError("initial heights length does not match the system size");
    for (double x : c.c)
        if (!std::isfinite(x)) throw ValidationError("initial heights must be finite");
    Vec g(n);
    for (int i = 0; i < n; ++i) g[i] = spec.beta.beta[i] + 2.0;
    const double g_min = *std::min_element(g.begin(), g.end());
    const double delta_stop = 0.05 * g_min;

    const double r0 =
        SingularStart::pick_r0(spec.a, spec.beta, c.c, kEpsStart, std::exp(spec.t_min)) *
        spec.start_scale;
    SingularStart start(spec.a, spec.beta, c.c, r0, 4);
    const double t0 = std::log(r0);

    RadialProfile p;
    p.coupling = spec.a;
    p.beta = spec.beta;
    p.c0 = c.c;
    p.u.assign(n, Vec{});
    p.du.assign(n, Vec{});
    p.tol_step = spec.tol_step;
    p.tol_energy = spec.tol_energy;
    p.diag.contraction = start.contraction();
    p.diag.start_error_bound = start.error_bound();

    // State: [u, w = du/dt, s = energy quadrature, ls = log-moment quadrature].
    Vec y0(4 * n);
    {
        const Vec u0 = start.u_at_r0();
        const Vec w0 = start.dudt_at_r0();
        const Vec hs = start.head_sigma();
        const Vec hl = start.head_logmoment();
        for (int i = 0; i < n; ++i) {
            y0[i] = u0[i];
            y0[n + i] = w0[i];
            y0[2 * n + i] = hs[i];
            y0[3 * n + i] = hl[i];
        }
        p.diag.head_sigma = hs;
    }

    Vec e_buf(n);
    auto rhs = [&](double t, const Vec& y, Vec& dy) {
        for (int j = 0; j < n; ++j) {
            const double arg = g[j] * t + y[j];
            if (arg > kExpGuard) throw StepUnderflow("state blow-up in the exponential weight");
            e_buf[j] = std::exp(arg);
        }
        for (int i = 0; i < n; ++i) {
            dy[i] = y[n + i];
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                const double aij = spec.a.entries(i, j);
                if (aij != 0.0) acc += aij * e_buf[j];
            }
            dy[n + i] = -acc;
            dy[2 * n + i] = e_buf[i];
            dy[3 * n + i] = t * e_buf[i];
        }
    };

    p.grid.push_back(t0);
    for (int i = 0; i < n; ++i) {
        p.u[i].push_back(y0[i]);
        p.du[i].push_back(y0[n + i]);
    }

    bool converged = false;
    Vec y_end = y0;
    double t_end = t0;
    long steps = 0;

    Vec checkpoints{spec.t_max};
    StepperOptions opt;
    opt.tol = 0.05 * spec.tol_step; // controller safety margin under the contract
    opt.h_max = 1.0;
    opt.checkpoints = &checkpoints;

    integrate_dp45(
        rhs, t0, y0, spec.t_max, opt,
        [&](double t, const Vec& y, const Vec&) -> StepFlow {
            ++steps;
            p.grid.push_back(t);
            for (int i = 0; i < n; ++i) {
                p.u[i].push_back(y[i]);
                p.du[i].push_back(y[n + i]);
            }
            y_end = y;
            t_end = t;
            bool decayed = true;
            for (int i = 0; i < n && decayed; ++i)
                if (!(y[n + i] <= -g[i] - delta_stop)) decayed = false;
            if (decayed) {
                for (int i = 0; i < n && decayed; ++i) {
                    const double ei = std::exp(g[i] * t + y[i]);
                    const double tail = ei / (-y[n + i] - g[i]);
                    if (!(tail < spec.tol_energy)) decayed = false;
                }
            }
            if (decayed) {
                converged = true;
                return StepFlow::stop;
            }
            return StepFlow::proceed;
        });

    p.diag.steps = steps;
    p.converged = converged;

    // Tails and asymptotic data.
    Vec tail(n, 0.0), lam(n, 0.0);
    Vec e_end(n);
    for (int j = 0; j < n; ++j) e_end[j] = std::exp(g[j] * t_end + y_end[j]);
    if (converged) {
        for (int j = 0; j < n; ++j) {
            lam[j] = -y_end[n + j] - g[j];
            tail[j] = e_end[j] / lam[j];
        }
    }
    p.diag.tail_energy = tail;

    p.sigma.sigma.resize(n);
    p.m.resize(n);
    p.diag.log_moment.resize(n);
    for (int i = 0; i < n; ++i) {
        p.sigma.sigma[i] = y_end[2 * n + i] + tail[i];
        double mcorr = 0.0;
        for (int j = 0; j < n; ++j) mcorr += spec.a.entries(i, j) * tail[j];
        p.m[i] = -y_end[n + i] + mcorr;
        const double lam_i = std::max(lam[i], 1e-12);
        p.diag.log_moment[i] =
            y_end[3 * n + i] +
            (converged ? e_end[i] * (t_end / lam_i + 1.0 / (lam_i * lam_i)) : 0.0);
    }

    if (converged) {
        // Intercepts: constant least-squares fit of u_i + m_i t over the last
        // decade of r, plus the integral identity as a cross-check.
        const double window = std::log(10.0);
        size_t k0 = p.grid.size() - 1;
        while (k0 > 0 && p.grid[k0 - 1] > t_end - window) --k0;
        if (p.grid.size() - k0 < 2) k0 = (p.grid.size() >= 2) ? p.grid.size() - 2 : 0;
        p.c_const.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (size_t k = k0; k < p.grid.size(); ++k)
                acc += p.u[i][k] + p.m[i] * p.grid[k];
            p.c_const[i] = acc / static_cast<double>(p.grid.size() - k0);
        }
        p.diag.c_const_integral.resize(n);
        for (int i = 0; i < n; ++i) {
            double acc = c.c[i];
            for (int j = 0; j < n; ++j)
                acc += spec.a.entries(i, j) * p.diag.log_moment[j];
            p.diag.c_const_integral[i] = acc;
        }

        // Empirical decay exponent of the intercept remainder, measured
        // against the integral-identity intercept (the fit constant's own
        // error would swamp the remainder). Falls back to the slope gap when
        // the remainder sits at roundoff.
        double theo = lam[0];
        for (int j = 1; j < n; ++j) theo = std::min(theo, lam[j]);
        double emp = theo;
        const size_t ka = k0, kb = p.grid.size() - 1;
        if (kb > ka) {
            double best = 0.0;
            bool have = false;
            for (int i = 0; i < n; ++i) {
                const double ci = p.diag.c_const_integral[i];
                const double ra = std::fabs(p.u[i][ka] + p.m[i] * p.grid[ka] - ci);
                const double rb = std::fabs(p.u[i][kb] + p.m[i] * p.grid[kb] - ci);
                if (ra > 1e-12 && rb > 1e-14 && rb < ra) {
                    const double d = std::log(ra / rb) / (p.grid[kb] - p.grid[ka]);
                    if (!have || d < best) best = d, have = true;
                }
            }
            if (have) emp = best;
        }
        p.diag.tail_exponent_estimate = emp;

        // Pohozaev residual and the partial-energy values.
        std::vector<int> full(n);
        for (int i = 0; i < n; ++i) full[i] = i;
        p.diag.lambda_i_residual = lambda_j(full, p.sigma, spec.a, spec.beta);
        if (n <= 10) {
            for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
                std::vector<int> sub;
                for (int i = 0; i < n; ++i)
                    if (mask & (1u << i)) sub.push_back(i);
                p.diag.lambda_js.emplace_back(sub, lambda_j(sub, p.sigma, spec.a, spec.beta));
            }
        }
        p.diag.energy_cross_residual.resize(n);
        const Vec as = mat_vec(spec.a.entries, p.sigma.sigma);
        for (int i = 0; i < n; ++i) p.diag.energy_cross_residual[i] = as[i] - p.m[i];
    }

    return p;
}

EnergyComputation compute_energy(const RadialProfile& p, const ProblemSpec& spec) {
    if (!p.converged) throw BaseNotConverged();
    const int n = p.n();
    EnergyComputation out;
    out.sigma.sigma.assign(n, 0.0);
    out.tail.assign(n, 0.0);

    for (int i = 0; i < n; ++i) {
        const double gi = p.beta.beta[i] + 2.0;
        double acc = p.diag.head_sigma.empty() ? 0.0 : p.diag.head_sigma[i];
        if (p.diag.head_sigma.empty()) {
            // Head from the growth rate of the weight at the first point.
            const double e0 = p.weight(i, 0);
            acc = e0 / (gi + p.du[i][0]);
        }
        for (size_t k = 0; k + 1 < p.grid.size(); ++k) {
            const double h = p.grid[k + 1] - p.grid[k];
            double iv = 0.0;
            for (int q = 0; q < 5; ++q) {
                const double t = p.grid[k] + kGx[q] * h;
                iv += kGw[q] * std::exp(gi * t + p.sample_u(i, t));
            }
            acc += iv * h;
        }
        const double lam = p.m[i] - gi;
        const double tail = p.weight(i, p.grid.size() - 1) / lam;
        if (tail > 10.0 * spec.tol_energy)
            throw TailDominates("tail estimate " + std::to_string(tail) + " for component " +
                                std::to_string(i + 1));
        out.tail[i] = tail;
        out.sigma.sigma[i] = acc + tail;
    }

    out.cross_residual.resize(n);
    const Vec as = mat_vec(spec.a.entries, out.sigma.sigma);
    for (int i = 0; i < n; ++i) out.cross_residual[i] = as[i] - p.m[i];
    return out;
}

double residual(const RadialProfile& profile, const ProblemSpec&) {
    return residual_max_defect(profile);
}

} // namespace liouville

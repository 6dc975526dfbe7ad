#include "liouville/linearized.hpp"

#include <algorithm>
#include <cmath>

#include "liouville/errors.hpp"
#include "liouville/series.hpp"
#include "liouville/stepper.hpp"

namespace liouville {

namespace {

// Shared core: integrates chi'' + 2k chi' + sum_j a_ij E_j chi_j = 0 in
// t = log r along the base grid, with chi = r^(-k) phi. Moment quadrature
// rides along as extra state.
LinearizedProfile integrate_linearized(const RadialProfile& base, int k, const Vec& init) {
    if (!base.converged) throw BaseNotConverged();
    const int n = base.n();
    Vec g(n);
    for (int i = 0; i < n; ++i) g[i] = base.beta.beta[i] + 2.0;

    const double t0 = base.t_front();
    SingularStart start(base.coupling, base.beta, base.c0, std::exp(t0), 4);
    const SingularStart::LinearInit li = start.linear_start(k, init);

    LinearizedProfile lp;
    lp.mode = k;
    lp.alpha = init;
    lp.grid = base.grid;
    lp.phi.assign(n, Vec{});
    lp.dphi.assign(n, Vec{});
    lp.partial_moments.assign(n, Vec{});

    const double scale = std::max(1.0, max_abs(init));

    // State: [chi, dchi, moments].
    Vec y0(3 * n);
    for (int i = 0; i < n; ++i) {
        y0[i] = li.chi[i];
        y0[n + i] = li.dchi[i];
        y0[2 * n + i] = li.head_moment[i];
    }

    auto store = [&](double t, const Vec& y) {
        const double ekt = std::exp(k * t);
        for (int i = 0; i < n; ++i) {
            lp.phi[i].push_back(ekt * y[i]);
            lp.dphi[i].push_back(ekt * (y[n + i] + k * y[i]));
            lp.partial_moments[i].push_back(y[2 * n + i]);
        }
    };
    store(t0, y0);

    Vec e_buf(n);
    auto rhs = [&](double t, const Vec& y, Vec& dy) {
        for (int j = 0; j < n; ++j)
            e_buf[j] = std::exp(g[j] * t + base.sample_u(j, t));
        const double ekt = std::exp(k * t);
        for (int i = 0; i < n; ++i) {
            dy[i] = y[n + i];
            double acc = 2.0 * k * y[n + i];
            for (int j = 0; j < n; ++j) {
                const double aij = base.coupling.entries(i, j);
                if (aij != 0.0) acc += aij * e_buf[j] * y[j];
            }
            dy[n + i] = -acc;
            dy[2 * n + i] = e_buf[i] * ekt * y[i];
        }
    };

    StepperOptions opt;
    opt.tol = 0.05 * base.tol_step * scale;
    opt.rtol = 0.05 * base.tol_step; // moment components may grow; keep them relative
    opt.h_max = 1.0;
    opt.checkpoints = &base.grid;

    size_t next = 1; // base grid index the next checkpoint lands on
    Vec y_end = y0;
    integrate_dp45(rhs, t0, y0, base.t_back(), opt,
                   [&](double t, const Vec& y, const Vec&) -> StepFlow {
                       if (next < base.grid.size() &&
                           std::fabs(t - base.grid[next]) < 1e-12) {
                           store(t, y);
                           ++next;
                       }
                       y_end = y;
                       return StepFlow::proceed;
                   });
    if (lp.phi[0].size() != base.grid.size())
        throw StepUnderflow("linearized solve failed to land on the base grid");

    lp.moments.resize(n);
    lp.tail_moments.assign(n, 0.0);
    const size_t last = base.points() - 1;
    for (int i = 0; i < n; ++i) {
        lp.moments[i] = y_end[2 * n + i];
        const double lam = base.m[i] - g[i];
        if (lam > 0.0) {
            const double ei = base.weight(i, last);
            // Int_T^inf E phi with E ~ e^(-lam (t-T)) and phi locally linear.
            lp.tail_moments[i] =
                ei * (lp.phi[i][last] / lam + lp.dphi[i][last] / (lam * lam));
        }
    }

    if (k == 0) {
        double cbound = 0.0;
        for (int i = 0; i < n; ++i)
            for (size_t p = 0; p < lp.grid.size(); ++p)
                cbound = std::max(cbound, std::fabs(lp.phi[i][p]) /
                                              (1.0 + std::fabs(lp.grid[p])));
        lp.growth_bound_c = cbound;
    } else {
        // Growth against r^k (1+r)^(-2k), normalized by the entry level of
        // the regular branch.
        double ref = 0.0, peak = -1e308;
        bool any = false;
        for (int i = 0; i < n; ++i) {
            bool have_ref = false;
            for (size_t p = 0; p < lp.grid.size(); ++p) {
                const double a = std::fabs(lp.phi[i][p]);
                if (a < 1e-280) continue;
                const double t = lp.grid[p];
                const double lenv = k * t - 2.0 * k * std::log1p(std::exp(t));
                const double ratio = std::log(a) - lenv;
                if (!have_ref) {
                    ref = std::max(ref, ratio);
                    have_ref = true;
                    any = true;
                }
                peak = std::max(peak, ratio);
            }
        }
        lp.envelope_factor = any ? std::exp(peak - ref) : 1.0;
        lp.envelope_bounded = lp.envelope_factor < 1e3;
    }
    return lp;
}

} // namespace

LinearizedProfile solve_mode0(const RadialProfile& base, const Vec& alpha) {
    if (static_cast<int>(alpha.size()) != base.n())
        throw ValidationError("alpha length does not match the system size");
    return integrate_linearized(base, 0, alpha);
}

LinearizedProfile solve_mode_k(const RadialProfile& base, int k, const Vec& leading) {
    if (k < 1) throw InvalidMode("mode k must be >= 1");
    if (static_cast<int>(leading.size()) != base.n())
        throw ValidationError("leading length does not match the system size");
    return integrate_linearized(base, k, leading);
}

double kernel_partial_integral_check(const RadialProfile& base, const LinearizedProfile& phi0) {
    const int n = base.n();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double peak = 0.0;
        for (size_t p = 0; p < base.points(); ++p) peak = std::max(peak, base.weight(i, p));
        for (size_t p = 0; p < base.points(); ++p) {
            const double lhs = phi0.partial_moments[i][p];
            const double rhs = base.weight(i, p);
            worst = std::max(worst, std::fabs(lhs - rhs) / peak);
        }
    }
    return worst;
}

double mode_residual(const RadialProfile& base, const LinearizedProfile& lp) {
    const int n = base.n();
    const int k = lp.mode;

    auto curvature = [&](size_t p) {
        Vec s(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = static_cast<double>(k) * k * lp.phi[i][p];
            for (int j = 0; j < n; ++j) {
                const double aij = base.coupling.entries(i, j);
                if (aij != 0.0) acc -= aij * base.weight(j, p) * lp.phi[j][p];
            }
            s[i] = acc;
        }
        return s;
    };

    double worst = 0.0;
    Vec pm(n);
    for (size_t p = 0; p + 1 < lp.grid.size(); ++p) {
        const double h = lp.grid[p + 1] - lp.grid[p];
        const double tm = lp.grid[p] + 0.5 * h;
        const Vec s0 = curvature(p), s1 = curvature(p + 1);
        for (int i = 0; i < n; ++i)
            pm[i] = hermite5(0.5, lp.phi[i][p], lp.dphi[i][p] * h, s0[i] * h * h,
                             lp.phi[i][p + 1], lp.dphi[i][p + 1] * h, s1[i] * h * h);
        for (int i = 0; i < n; ++i) {
            const double second =
                hermite5_d2(0.5, lp.phi[i][p], lp.dphi[i][p] * h, s0[i] * h * h,
                            lp.phi[i][p + 1], lp.dphi[i][p + 1] * h, s1[i] * h * h) /
                (h * h);
            double rhs = static_cast<double>(k) * k * pm[i];
            for (int j = 0; j < n; ++j) {
                const double aij = base.coupling.entries(i, j);
                if (aij == 0.0) continue;
                rhs -= aij *
                       std::exp((base.beta.beta[j] + 2.0) * tm + base.sample_u(j, tm)) *
                       pm[j];
            }
            worst = std::max(worst, std::fabs(second - rhs));
        }
    }
    return worst;
}

JacobianResult variational_jacobian(const ProblemSpec& spec, const InitialHeights& c) {
    const RadialProfile base = integrate(spec, c);
    if (!base.converged) throw BaseNotConverged();
    return variational_jacobian(spec, base);
}

JacobianResult variational_jacobian(const ProblemSpec& spec, const RadialProfile& base) {
    if (!base.converged) throw BaseNotConverged();
    const int n = spec.n();
    JacobianResult out;
    out.sensitivity.assign(n, Vec(std::max(0, n - 1), 0.0));
    out.m = Mat(std::max(0, n - 1));
    if (n == 1) return out; // the normalization exhausts all freedom

    for (int col = 0; col < n - 1; ++col) {
        Vec unit(n, 0.0);
        unit[col] = 1.0;
        const LinearizedProfile psi = solve_mode0(base, unit);
        for (int i = 0; i < n; ++i)
            out.sensitivity[i][col] = psi.moments[i] + psi.tail_moments[i];
    }
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j) out.m(i, j) = out.sensitivity[i][j];

    const Vec sv = singular_values(out.m);
    out.smallest_singular_value = sv.back();
    out.condition = (sv.back() > 0.0) ? sv.front() / sv.back() : 1e308;
    return out;
}

ComparisonReport comparison_function_check(const RadialProfile& base, int k) {
    if (!base.converged) throw BaseNotConverged();
    if (k < 2) throw InvalidMode("comparison function applies to modes k >= 2");
    const int n = base.n();
    for (int i = 0; i < n; ++i)
        if (base.beta.beta[i] >= 0.0)
            throw BetaNotNegative("component " + std::to_string(i + 1) +
                                  " has beta >= 0");

    ComparisonReport rep;
    rep.f_positive = true;
    rep.margin_negative = true;
    rep.worst_margin = -1e308;
    rep.min_f = 1e308;

    const size_t np = base.points();
    for (size_t p = 0; p < np; ++p) {
        const double t = base.grid[p];
        for (int i = 0; i < n; ++i) {
            const double f = -base.du[i][p] * std::exp(-t); // f_i = -u_i'(r)
            rep.min_f = std::min(rep.min_f, f);
            if (!(f > 0.0)) rep.f_positive = false;
            // r^3 times the operator applied to f:
            //   sum_j a_ij beta_j E_j + (k^2 - 1) du_i
            double margin = (static_cast<double>(k) * k - 1.0) * base.du[i][p];
            for (int j = 0; j < n; ++j) {
                const double aij = base.coupling.entries(i, j);
                if (aij != 0.0) margin += aij * base.beta.beta[j] * base.weight(j, p);
            }
            rep.worst_margin = std::max(rep.worst_margin, margin);
            if (!(margin < 0.0)) rep.margin_negative = false;
        }
    }

    // Divergence of f_i/r^k at 0 and f_i r^k at infinity, probed on a quarter
    // of the window from each end (log-space slopes).
    const double span = base.t_back() - base.t_front();
    const double ta = base.t_front(), tb = base.t_front() + 0.25 * span;
    const double tc = base.t_back() - 0.25 * span, td = base.t_back();
    rep.diverges_at_zero = true;
    rep.diverges_at_infinity = true;
    for (int i = 0; i < n; ++i) {
        auto logf = [&](double t) {
            const double d = -base.sample_du(i, t);
            return std::log(std::max(d, 1e-300)) - t;
        };
        if (!(logf(ta) - k * ta > logf(tb) - k * tb)) rep.diverges_at_zero = false;
        if (!(logf(td) + k * td > logf(tc) + k * tc)) rep.diverges_at_infinity = false;
    }
    return rep;
}

} // namespace liouville

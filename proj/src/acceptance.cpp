#include "liouville/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "liouville/errors.hpp"
#include "liouville/linearized.hpp"
#include "liouville/oracle.hpp"
#include "liouville/shooting.hpp"

namespace liouville {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// Worst Lambda_J over all proper nonempty subsets.
double min_lambda_proper(const RadialProfile& p) {
    const int n = p.n();
    double worst = 1e308;
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<int> sub;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) sub.push_back(i);
        worst = std::min(worst, lambda_j(sub, p.sigma, p.coupling, p.beta));
    }
    return worst;
}

RandomInstance draw_converged(int n, std::uint64_t& state, RadialProfile& profile,
                              double beta_lo = -1.9, double beta_hi = 3.0) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        RandomInstance inst = random_instance(n, state, beta_lo, beta_hi);
        profile = integrate(inst.spec, inst.c);
        if (profile.converged) return inst;
    }
    throw SamplingExhausted("no converging random instance found");
}

using Criterion = std::function<void(CriterionResult&)>;

CriterionResult run_one(int id, const std::string& name, const Criterion& body) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    const double t0 = now_seconds();
    try {
        r.pass = true;
        body(r);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail += std::string(" exception: ") + e.what();
    }
    r.seconds = now_seconds() - t0;
    return r;
}

void criterion_oracle(CriterionResult& r) {
    const double betas[] = {0.0, -0.5, -1.0, -1.5};
    const double mus[] = {0.1, 1.0, 8.0, 100.0};
    double worst_u = 0.0, worst_sigma = 0.0, worst_time = 0.0;
    Mat unit(1);
    unit(0, 0) = 1.0;
    for (double beta : betas)
        for (double mu : mus) {
            ProblemSpec spec = make_problem_spec(unit, {beta}, 1e-10, 1e-12);
            const double t0 = now_seconds();
            const RadialProfile p = integrate(spec, InitialHeights{{std::log(mu)}});
            const double dt = now_seconds() - t0;
            worst_time = std::max(worst_time, dt);
            if (!p.converged) {
                r.pass = false;
                r.detail += " not converged (beta=" + fmt(beta) + ", mu=" + fmt(mu) + ");";
                continue;
            }
            const ScalarSolution sol{mu, beta};
            const double t_lo = std::log(1e-6), t_hi = std::log(1e6);
            double err = 0.0;
            for (size_t k = 0; k < p.grid.size(); ++k) {
                const double t = p.grid[k];
                if (t < t_lo || t > t_hi) continue;
                err = std::max(err, std::fabs(p.u[0][k] - sol.eval_log(t).u));
            }
            for (int q = 0; q <= 1500; ++q) {
                const double t = t_lo + (t_hi - t_lo) * q / 1500.0;
                err = std::max(err, std::fabs(p.sample_u(0, t) - sol.eval_log(t).u));
            }
            const double serr = std::fabs(p.sigma.sigma[0] - forced_energy(beta));
            worst_u = std::max(worst_u, err);
            worst_sigma = std::max(worst_sigma, serr);
            if (err > 1e-7 || serr > 1e-7 || dt > 1.0) r.pass = false;
        }
    r.detail = "max|du|=" + fmt(worst_u) + " max|dsigma|=" + fmt(worst_sigma) +
               (worst_time <= 1.0 ? " per-case budget ok" : " per-case budget exceeded");
}

struct SuiteStats {
    int converged = 0, skipped = 0;
    double worst_pohozaev = 0.0; // |Lambda_I| / scale
    double worst_lambda_j = 1e308;
    double worst_slope_margin = 1e308; // min (m_i - 2 - beta_i)
    double worst_cross = 0.0;          // |A sigma - m|_inf
    double seconds = 0.0;
};

SuiteStats pohozaev_suite() {
    SuiteStats st;
    std::uint64_t state = 20240811ull;
    const double t0 = now_seconds();
    for (int inst = 0; inst < 50; ++inst) {
        const int n = 2 + inst % 3;
        RandomInstance ri = random_instance(n, state);
        const RadialProfile p = integrate(ri.spec, ri.c);
        if (!p.converged) {
            ++st.skipped;
            continue;
        }
        ++st.converged;
        const double scale = lambda_scale(p.sigma, ri.spec.a);
        st.worst_pohozaev =
            std::max(st.worst_pohozaev, std::fabs(p.diag.lambda_i_residual) / scale);
        st.worst_lambda_j = std::min(st.worst_lambda_j, min_lambda_proper(p));
        for (int i = 0; i < n; ++i)
            st.worst_slope_margin = std::min(
                st.worst_slope_margin, p.m[i] - (ri.spec.beta.beta[i] + 2.0));
        st.worst_cross = std::max(st.worst_cross, max_abs(p.diag.energy_cross_residual));
    }
    st.seconds = now_seconds() - t0;
    return st;
}

void criterion_pohozaev(CriterionResult& r, const SuiteStats& st) {
    r.pass = st.converged > 0 && st.worst_pohozaev <= 1e-6 && st.worst_lambda_j > 0.0 &&
             st.worst_slope_margin > 0.0 && st.seconds <= 60.0;
    r.detail = "converged=" + std::to_string(st.converged) + "/50 |Lambda_I|/scale<=" +
               fmt(st.worst_pohozaev) + " min Lambda_J=" + fmt(st.worst_lambda_j) +
               " min(m-2-beta)=" + fmt(st.worst_slope_margin) +
               (st.seconds <= 60.0 ? " budget ok" : " budget exceeded");
}

void criterion_cross_check(CriterionResult& r, const SuiteStats& st) {
    r.pass = st.converged > 0 && st.worst_cross <= 1e-5;
    r.detail = "max|A sigma - m|=" + fmt(st.worst_cross);
}

void criterion_scaling(CriterionResult& r) {
    std::uint64_t state = 77031ull;
    const double deltas[] = {0.5, 2.0, 10.0};
    double worst = 0.0;
    bool sigma_identical = true;
    for (int inst = 0; inst < 10; ++inst) {
        RadialProfile pa;
        const RandomInstance ri = draw_converged(2 + inst % 2, state, pa);
        const int n = ri.spec.n();
        for (double delta : deltas) {
            Vec cb = ri.c.c;
            for (int i = 0; i < n; ++i)
                cb[i] += (ri.spec.beta.beta[i] + 2.0) * std::log(delta);
            const RadialProfile pb = integrate(ri.spec, InitialHeights{cb});
            if (!pb.converged) continue;
            const RadialProfile ps = scale_profile(pa, delta);
            for (int i = 0; i < n; ++i)
                if (ps.sigma.sigma[i] != pa.sigma.sigma[i]) sigma_identical = false;
            const double lo = std::max(pb.t_front(), ps.t_front());
            const double hi = std::min(pb.t_back(), ps.t_back());
            for (size_t k = 0; k < pb.grid.size(); ++k) {
                const double t = pb.grid[k];
                if (t < lo || t > hi) continue;
                for (int i = 0; i < n; ++i)
                    worst = std::max(worst,
                                     std::fabs(pb.u[i][k] - ps.sample_u(i, t)));
            }
        }
    }
    r.pass = worst <= 1e-7 && sigma_identical;
    r.detail = "max|du|=" + fmt(worst) +
               (sigma_identical ? " sigma bit-identical" : " sigma mismatch");
}

void criterion_kernel(CriterionResult& r) {
    std::uint64_t state = 4242ull;
    double worst_id = 0.0, worst_int = 0.0;
    for (int inst = 0; inst < 10; ++inst) {
        RadialProfile p;
        const RandomInstance ri = draw_converged(2 + inst % 3, state, p);
        const int n = ri.spec.n();
        Vec alpha(n);
        for (int i = 0; i < n; ++i) alpha[i] = ri.spec.beta.beta[i] + 2.0;
        const LinearizedProfile lp = solve_mode0(p, alpha);
        for (int i = 0; i < n; ++i)
            for (size_t k = 0; k < p.grid.size(); ++k)
                worst_id = std::max(
                    worst_id, std::fabs(lp.phi[i][k] - (p.du[i][k] + alpha[i])));
        worst_int = std::max(worst_int, kernel_partial_integral_check(p, lp));
    }
    r.pass = worst_id <= 1e-7 && worst_int <= 1e-6;
    r.detail = "max|phi - (rdu+2+beta)|=" + fmt(worst_id) +
               " kernel integral residual=" + fmt(worst_int);
}

void criterion_jacobian(CriterionResult& r) {
    std::uint64_t state = 90210ull;
    double worst_rel = 0.0, min_sv = 1e308;
    const double h = 1e-4;
    for (int inst = 0; inst < 10; ++inst) {
        RadialProfile p;
        const RandomInstance ri = draw_converged(2 + inst % 2, state, p);
        const int n = ri.spec.n();
        const JacobianResult jac = variational_jacobian(ri.spec, p);
        min_sv = std::min(min_sv, jac.smallest_singular_value);
        double fd_peak = 0.0;
        Mat fd(n - 1);
        for (int col = 0; col < n - 1; ++col) {
            Vec cp = ri.c.c, cm = ri.c.c;
            cp[col] += h;
            cm[col] -= h;
            const RadialProfile pp = integrate(ri.spec, InitialHeights{cp});
            const RadialProfile pm = integrate(ri.spec, InitialHeights{cm});
            for (int i = 0; i < n - 1; ++i) {
                fd(i, col) = (pp.sigma.sigma[i] - pm.sigma.sigma[i]) / (2.0 * h);
                fd_peak = std::max(fd_peak, std::fabs(fd(i, col)));
            }
        }
        for (int i = 0; i < n - 1; ++i)
            for (int col = 0; col < n - 1; ++col) {
                const double denom = std::max(std::fabs(fd(i, col)), 1e-3 * fd_peak);
                worst_rel = std::max(worst_rel,
                                     std::fabs(jac.m(i, col) - fd(i, col)) / denom);
            }
    }
    r.pass = worst_rel <= 1e-4 && min_sv > 0.0;
    r.detail = "max rel dev=" + fmt(worst_rel) + " min singular value=" + fmt(min_sv);
}

void criterion_shooting(CriterionResult& r) {
    std::uint64_t state = 5150ull;
    double worst_miss = 0.0, worst_spread = 0.0;
    int done = 0;
    const double t0 = now_seconds();
    for (int block = 0; block < 4; ++block) {
        const int n = 2 + block % 2;
        RadialProfile scratch;
        const RandomInstance ri = draw_converged(n, state, scratch);
        const auto targets = sample_pi2(ri.spec.a, ri.spec.beta, 5, 1000 + block);
        for (const auto& tgt : targets) {
            const ShootingResult res = shoot(ri.spec, tgt, std::nullopt, 1e-8);
            double miss = 0.0;
            for (int i = 0; i < n; ++i)
                miss = std::max(miss,
                                std::fabs(res.achieved.sigma[i] - tgt.sigma[i]));
            worst_miss = std::max(worst_miss, miss);
            if (!res.converged) r.pass = false;
            const UniquenessReport uq =
                uniqueness_probe(ri.spec, tgt, 5, 99 + block, 1e-8);
            worst_spread = std::max(worst_spread, uq.spread);
            ++done;
        }
    }
    const double dt = now_seconds() - t0;
    if (worst_miss > 1e-8 || worst_spread > 1e-5 || done != 20 || dt > 300.0)
        r.pass = false;
    r.detail = "targets=" + std::to_string(done) + " max miss=" + fmt(worst_miss) +
               " max spread=" + fmt(worst_spread) +
               (dt <= 300.0 ? " budget ok" : " budget exceeded");
}

void criterion_continuation(CriterionResult& r) {
    Mat a(2);
    a(0, 1) = a(1, 0) = 1.0;
    ProblemSpec spec = make_problem_spec(a, {0.0, 0.0});
    // An asymmetric admissible point: sigma_2 = 2 sigma_1 / (sigma_1 - 2).
    const EnergyVector target{{3.8, 38.0 / 9.0}};
    const Vec ladder = {1e-1, 1e-2, 1e-3, 1e-4};
    const ContinuationResult res = continuation_shoot(spec, target, ladder, 1e-8);
    const RadialProfile& p = res.rungs.back().result.profile;
    const double scale = lambda_scale(p.sigma, p.coupling);
    const double poho = std::fabs(p.diag.lambda_i_residual) / scale;
    const double lmin = min_lambda_proper(p);
    double slope_margin = 1e308;
    for (int i = 0; i < 2; ++i)
        slope_margin = std::min(slope_margin, p.m[i] - (p.beta.beta[i] + 2.0));
    const double cross = max_abs(p.diag.energy_cross_residual);
    r.pass = res.cauchy_gap <= 1e-4 && poho <= 1e-6 && lmin > 0.0 && slope_margin > 0.0 &&
             cross <= 1e-5;
    r.detail = "cauchy gap=" + fmt(res.cauchy_gap) + " |Lambda_I|/scale=" + fmt(poho) +
               " min Lambda_J=" + fmt(lmin) + " cross=" + fmt(cross);
}

void criterion_translation_mode(CriterionResult& r) {
    Mat unit(1);
    unit(0, 0) = 1.0;
    // beta = 0: the translation direction u' spans a genuine mode-1 kernel.
    ProblemSpec s0 = make_problem_spec(unit, {0.0});
    const RadialProfile p0 = integrate(s0, InitialHeights{{std::log(8.0)}});
    const LinearizedProfile m0 = solve_mode_k(p0, 1, {-4.0}); // u''(0) = -mu/2
    const double res0 = mode_residual(p0, m0);

    // beta = -1: no bounded mode-1 kernel; the regular branch must blow
    // through the r (1+r)^-2 envelope.
    ProblemSpec s1 = make_problem_spec(unit, {-1.0});
    const RadialProfile p1 = integrate(s1, InitialHeights{{std::log(2.0)}});
    const LinearizedProfile m1 = solve_mode_k(p1, 1, {1.0});

    r.pass = res0 <= 1e-7 && m1.envelope_factor >= 1e3;
    r.detail = "mode-1 residual=" + fmt(res0) +
               " envelope factor (beta=-1)=" + fmt(m1.envelope_factor);
}

void criterion_comparison(CriterionResult& r) {
    std::uint64_t state = 31337ull;
    double worst_margin = -1e308;
    for (int inst = 0; inst < 5; ++inst) {
        RadialProfile p;
        draw_converged(2 + inst % 2, state, p, -1.9, -0.05);
        for (int k : {2, 3}) {
            const ComparisonReport rep = comparison_function_check(p, k);
            worst_margin = std::max(worst_margin, rep.worst_margin);
            if (!rep.all_ok()) r.pass = false;
        }
    }
    r.detail = "worst operator margin=" + fmt(worst_margin);
}

void criterion_idempotence(CriterionResult& r) {
    std::uint64_t state = 86420ull;
    double worst = 0.0;
    for (int inst = 0; inst < 10; ++inst) {
        RadialProfile pa;
        const RandomInstance ri = draw_converged(2 + inst % 3, state, pa);
        ProblemSpec tight = ri.spec;
        tight.start_scale = 0.5;
        tight.tol_step /= 10.0;
        tight.tol_energy /= 10.0;
        const RadialProfile pb = integrate(tight, ri.c);
        if (!pb.converged) continue;
        const double lo = std::max(pa.t_front(), pb.t_front());
        const double hi = std::min(pa.t_back(), pb.t_back());
        for (size_t k = 0; k < pa.grid.size(); ++k) {
            const double t = pa.grid[k];
            if (t < lo || t > hi) continue;
            for (int i = 0; i < ri.spec.n(); ++i)
                worst = std::max(worst, std::fabs(pa.u[i][k] - pb.sample_u(i, t)));
        }
    }
    r.pass = worst <= 10.0 * 1e-10;
    r.detail = "max profile change=" + fmt(worst) + " (bound 1e-9)";
}

} // namespace

Mat random_h1_matrix(int n, std::uint64_t& state) {
    for (int attempt = 0; attempt < 500; ++attempt) {
        Mat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 0.3 + 1.2 * uniform01(state);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double gate = uniform01(state);
                const double v = (gate < 0.3) ? 0.0 : 0.05 + 0.95 * uniform01(state);
                m(i, j) = m(j, i) = v;
            }
        try {
            validate_matrix(m);
            return m;
        } catch (const Error&) {
            continue;
        }
    }
    throw SamplingExhausted("no valid random coupling matrix found");
}

RandomInstance random_instance(int n, std::uint64_t& state, double beta_lo, double beta_hi) {
    const Mat a = random_h1_matrix(n, state);
    Vec beta(n), c(n);
    for (int i = 0; i < n; ++i) {
        beta[i] = beta_lo + (beta_hi - beta_lo) * uniform01(state);
        c[i] = -3.0 + 6.0 * uniform01(state);
    }
    RandomInstance inst;
    inst.spec = make_problem_spec(a, beta);
    inst.c = InitialHeights{c};
    return inst;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids) {
    auto wanted = [&](int id) {
        if (ids.empty()) return true;
        for (int x : ids)
            if (x == id) return true;
        return false;
    };

    std::vector<CriterionResult> out;
    if (wanted(1)) out.push_back(run_one(1, "oracle reproduction", criterion_oracle));
    if (wanted(2) || wanted(3)) {
        SuiteStats st;
        CriterionResult shell = run_one(0, "", [&](CriterionResult&) { st = pohozaev_suite(); });
        if (wanted(2)) {
            CriterionResult r = run_one(2, "pohozaev suite", [&](CriterionResult& rr) {
                criterion_pohozaev(rr, st);
            });
            r.seconds = st.seconds;
            if (!shell.pass) {
                r.pass = false;
                r.detail += shell.detail;
            }
            out.push_back(r);
        }
        if (wanted(3)) {
            CriterionResult r = run_one(3, "energy cross-check", [&](CriterionResult& rr) {
                criterion_cross_check(rr, st);
            });
            if (!shell.pass) {
                r.pass = false;
                r.detail += shell.detail;
            }
            out.push_back(r);
        }
    }
    if (wanted(4)) out.push_back(run_one(4, "scaling covariance", criterion_scaling));
    if (wanted(5)) out.push_back(run_one(5, "kernel identity", criterion_kernel));
    if (wanted(6)) out.push_back(run_one(6, "jacobian consistency", criterion_jacobian));
    if (wanted(7)) out.push_back(run_one(7, "shooting round-trip", criterion_shooting));
    if (wanted(8)) out.push_back(run_one(8, "zero-diagonal continuation", criterion_continuation));
    if (wanted(9)) out.push_back(run_one(9, "translation-mode check", criterion_translation_mode));
    if (wanted(10)) out.push_back(run_one(10, "comparison-function signs", criterion_comparison));
    if (wanted(11)) out.push_back(run_one(11, "uniqueness idempotence", criterion_idempotence));
    return out;
}

std::string format_acceptance_table(const std::vector<CriterionResult>& results) {
    std::ostringstream os;
    for (const auto& r : results) {
        os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": "
           << r.detail << " (" << fmt(r.seconds) << "s)\n";
    }
    return os.str();
}

} // namespace liouville

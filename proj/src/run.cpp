#include "liouville/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "liouville/acceptance.hpp"
#include "liouville/errors.hpp"
#include "liouville/io.hpp"
#include "liouville/oracle.hpp"
#include "liouville/shooting.hpp"

namespace liouville {

namespace {

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json base_report(const RunConfig& cfg) {
    Json r;
    r["command"] = cfg.command;
    r["timestamp"] = timestamp_utc();
    return r;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

int run_validate(const RunConfig& cfg, Json& rep) {
    rep["n"] = cfg.spec.n();
    rep["positive_diagonal"] = cfg.spec.a.positive_diagonal;
    rep["determinant"] = determinant(cfg.spec.a.entries);
    rep["valid"] = true;
    return 0;
}

int run_solve(const RunConfig& cfg, Json& rep, bool with_energy) {
    const RadialProfile p = integrate(cfg.spec, InitialHeights{*cfg.c});
    write_profile_csv(out_path(cfg, "profile.csv"), p);
    rep.update(profile_report(p));
    rep["iterations"] = p.diag.steps;
    if (cfg.spec.n() >= 2 && p.converged)
        rep["condition_M"] = variational_jacobian(cfg.spec, p).condition;
    else
        rep["condition_M"] = 1.0;
    if (cfg.delta && p.converged) {
        const RadialProfile sp = scale_profile(p, *cfg.delta);
        write_profile_csv(out_path(cfg, "profile_scaled.csv"), sp);
        rep["scaled"] = profile_report(sp);
        rep["scaled"]["delta"] = *cfg.delta;
    }
    if (with_energy && p.converged) {
        const EnergyComputation ec = compute_energy(p, cfg.spec);
        Json e;
        e["sigma_quadrature"] = Json::array();
        for (double v : ec.sigma.sigma) e["sigma_quadrature"].push_back(v);
        e["tail"] = Json::array();
        for (double v : ec.tail) e["tail"].push_back(v);
        e["cross_residual"] = Json::array();
        for (double v : ec.cross_residual) e["cross_residual"].push_back(v);
        rep["energy"] = e;
    }
    rep["residual_defect"] = residual(p, cfg.spec);
    return p.converged ? 0 : 2;
}

int run_shoot(const RunConfig& cfg, Json& rep) {
    const EnergyVector target{*cfg.target};
    std::optional<InitialHeights> guess;
    if (cfg.c) guess = InitialHeights{*cfg.c};
    if (!cfg.epsilon_ladder.empty()) {
        const ContinuationResult res =
            continuation_shoot(cfg.spec, target, cfg.epsilon_ladder, cfg.shoot_tol);
        Json rungs = Json::array();
        for (const auto& rung : res.rungs) {
            Json j;
            j["epsilon"] = rung.epsilon;
            j["projected_target"] = Json::array();
            for (double v : rung.projected_target.sigma) j["projected_target"].push_back(v);
            j["c"] = Json::array();
            for (double v : rung.result.c.c) j["c"].push_back(v);
            j["iterations"] = rung.result.iterations;
            j["converged"] = rung.result.converged;
            rungs.push_back(j);
        }
        rep["rungs"] = rungs;
        rep["cauchy_gap"] = res.cauchy_gap;
        const ShootingResult& last = res.rungs.back().result;
        rep.update(shooting_report(last));
        write_profile_csv(out_path(cfg, "profile.csv"), last.profile);
        return last.converged ? 0 : 2;
    }
    const ShootingResult res = shoot(cfg.spec, target, guess, cfg.shoot_tol);
    rep.update(shooting_report(res));
    write_profile_csv(out_path(cfg, "profile.csv"), res.profile);
    return res.converged ? 0 : 2;
}

int run_linearize(const RunConfig& cfg, Json& rep) {
    const RadialProfile base = integrate(cfg.spec, InitialHeights{*cfg.c});
    if (!base.converged) {
        rep.update(profile_report(base));
        return 2;
    }
    const int n = cfg.spec.n();
    Vec alpha(n);
    if (cfg.alpha) {
        if (static_cast<int>(cfg.alpha->size()) != n)
            throw ValidationError("alpha must have length n");
        alpha = *cfg.alpha;
    } else {
        for (int i = 0; i < n; ++i) alpha[i] = cfg.spec.beta.beta[i] + 2.0;
    }
    const LinearizedProfile lp = solve_mode0(base, alpha);
    write_linearized_csv(out_path(cfg, "linearized.csv"), lp);
    write_profile_csv(out_path(cfg, "profile.csv"), base);
    rep.update(profile_report(base));
    Json lin;
    lin["alpha"] = Json::array();
    for (double v : lp.alpha) lin["alpha"].push_back(v);
    lin["moments"] = Json::array();
    for (int i = 0; i < n; ++i) lin["moments"].push_back(lp.moments[i] + lp.tail_moments[i]);
    lin["growth_bound_C"] = lp.growth_bound_c;
    bool is_kernel_data = true;
    for (int i = 0; i < n; ++i)
        if (alpha[i] != cfg.spec.beta.beta[i] + 2.0) is_kernel_data = false;
    if (is_kernel_data)
        lin["kernel_integral_residual"] = kernel_partial_integral_check(base, lp);
    rep["linearized"] = lin;
    if (n >= 2) rep["jacobian"] = jacobian_report(variational_jacobian(cfg.spec, base));
    return 0;
}

int run_modes(const RunConfig& cfg, Json& rep) {
    const RadialProfile base = integrate(cfg.spec, InitialHeights{*cfg.c});
    if (!base.converged) {
        rep.update(profile_report(base));
        return 2;
    }
    const int n = cfg.spec.n();
    Vec leading(n, 1.0);
    if (cfg.alpha) {
        if (static_cast<int>(cfg.alpha->size()) != n)
            throw ValidationError("alpha must have length n");
        leading = *cfg.alpha;
    }
    const LinearizedProfile lp = solve_mode_k(base, cfg.k, leading);
    write_linearized_csv(out_path(cfg, "mode.csv"), lp);
    rep.update(profile_report(base));
    Json mj;
    mj["k"] = cfg.k;
    mj["leading"] = Json::array();
    for (double v : lp.alpha) mj["leading"].push_back(v);
    mj["envelope_factor"] = lp.envelope_factor;
    mj["envelope_bounded"] = lp.envelope_bounded;
    mj["residual"] = mode_residual(base, lp);
    rep["mode"] = mj;
    bool beta_negative = true;
    for (int i = 0; i < n; ++i)
        if (cfg.spec.beta.beta[i] >= 0.0) beta_negative = false;
    if (cfg.k >= 2 && beta_negative) {
        const ComparisonReport cr = comparison_function_check(base, cfg.k);
        Json cj;
        cj["f_positive"] = cr.f_positive;
        cj["margin_negative"] = cr.margin_negative;
        cj["worst_margin"] = cr.worst_margin;
        cj["diverges_at_zero"] = cr.diverges_at_zero;
        cj["diverges_at_infinity"] = cr.diverges_at_infinity;
        cj["all_ok"] = cr.all_ok();
        rep["comparison"] = cj;
    }
    return 0;
}

int run_sample(const RunConfig& cfg, Json& rep) {
    const auto samples = sample_pi2(cfg.spec.a, cfg.spec.beta, cfg.count, cfg.seed);
    Json arr = Json::array();
    for (const auto& s : samples) {
        Json row = Json::array();
        for (double v : s.sigma) row.push_back(v);
        arr.push_back(row);
    }
    rep["samples"] = arr;
    rep["count"] = samples.size();
    rep["seed"] = cfg.seed;
    return 0;
}

int run_oracle(const RunConfig& cfg, Json& rep) {
    const double mu = std::exp((*cfg.c)[0]);
    const double beta = cfg.spec.beta.beta[0];
    const ScalarSolution sol{mu, beta};
    RadialProfile p;
    p.coupling = cfg.spec.a;
    p.beta = cfg.spec.beta;
    p.c0 = {std::log(mu)};
    p.u.assign(1, Vec{});
    p.du.assign(1, Vec{});
    for (double t = cfg.spec.t_min; t <= cfg.spec.t_max + 1e-12; t += 0.05) {
        const auto pt = sol.eval_log(t);
        p.grid.push_back(t);
        p.u[0].push_back(pt.u);
        p.du[0].push_back(pt.rdu);
    }
    write_profile_csv(out_path(cfg, "profile.csv"), p);
    rep["mu"] = mu;
    rep["beta"] = beta;
    rep["kappa"] = sol.kappa();
    rep["forced_energy"] = forced_energy(beta);
    rep["residual_defect"] = residual_max_defect(p);
    return 0;
}

int run_suite(const RunConfig& cfg, Json& rep) {
    const auto results = run_acceptance();
    const std::string table = format_acceptance_table(results);
    std::cout << table;
    // Timings stay in the printed table and acceptance.txt; the report JSON
    // must be reproducible byte for byte.
    Json arr = Json::array();
    bool all = true;
    for (const auto& r : results) {
        Json j;
        j["id"] = r.id;
        j["name"] = r.name;
        j["pass"] = r.pass;
        j["detail"] = r.detail;
        arr.push_back(j);
        all = all && r.pass;
    }
    rep["criteria"] = arr;
    rep["all_pass"] = all;
    write_text(out_path(cfg, "acceptance.txt"), table);
    return all ? 0 : 1;
}

} // namespace

int run(const RunConfig& cfg) {
    Json rep = base_report(cfg);
    int status = 0;
    try {
        if (cfg.command == "validate")
            status = run_validate(cfg, rep);
        else if (cfg.command == "solve")
            status = run_solve(cfg, rep, false);
        else if (cfg.command == "energy")
            status = run_solve(cfg, rep, true);
        else if (cfg.command == "shoot")
            status = run_shoot(cfg, rep);
        else if (cfg.command == "linearize")
            status = run_linearize(cfg, rep);
        else if (cfg.command == "modes")
            status = run_modes(cfg, rep);
        else if (cfg.command == "sample")
            status = run_sample(cfg, rep);
        else if (cfg.command == "oracle")
            status = run_oracle(cfg, rep);
        else if (cfg.command == "suite")
            status = run_suite(cfg, rep);
        else
            throw SchemaError("unknown command '" + cfg.command + "'");
    } catch (const Error& e) {
        Json err;
        err["code"] = e.code();
        err["message"] = e.what();
        rep["error"] = err;
        status = 1;
    } catch (const std::exception& e) {
        Json err;
        err["code"] = "internal_error";
        err["message"] = e.what();
        rep["error"] = err;
        status = 1;
    }
    rep["exit_status"] = status;
    write_text(out_path(cfg, "report.json"), rep.dump(2) + "\n");
    return status;
}

} // namespace liouville

#include "liouville/shooting.hpp"

#include <algorithm>
#include <cmath>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

Vec default_guess(const ProblemSpec& spec, const EnergyVector& target) {
    // Anchored to the scalar closed form: c_i ~ log(sigma_i (2+beta_i)^2 / 2),
    // shifted so the last component lands at 0.
    const int n = spec.n();
    auto h = [&](int i) {
        const double g = spec.beta.beta[i] + 2.0;
        return std::log(target.sigma[i] * g * g / 2.0);
    };
    Vec c(n - 1);
    for (int i = 0; i < n - 1; ++i) c[i] = h(i) - h(n - 1);
    return c;
}

struct Evaluation {
    RadialProfile base;
    double fnorm = 0.0;     // sup-norm over the first n-1 energy mismatches
    double fnorm_all = 0.0; // sup-norm over all n components
};

Evaluation evaluate(const ProblemSpec& spec, const Vec& c_free, const EnergyVector& target) {
    const int n = spec.n();
    // Heights beyond +-100 are far outside any admissible solution scale;
    // treat them (and integrator breakdowns) as failed trials so the caller
    // backs off instead of aborting the whole shot.
    for (double x : c_free)
        if (!std::isfinite(x) || std::fabs(x) > 100.0) throw BaseNotConverged();
    Vec full(c_free);
    full.push_back(0.0);
    Evaluation ev;
    try {
        ev.base = integrate(spec, InitialHeights{full});
    } catch (const StepUnderflow&) {
        throw BaseNotConverged();
    }
    if (!ev.base.converged) throw BaseNotConverged();
    for (int i = 0; i < n; ++i) {
        const double d = std::fabs(ev.base.sigma.sigma[i] - target.sigma[i]);
        if (i < n - 1) ev.fnorm = std::max(ev.fnorm, d);
        ev.fnorm_all = std::max(ev.fnorm_all, d);
    }
    return ev;
}

enum class NewtonStatus { converged, stalled, lost };

struct NewtonOutcome {
    NewtonStatus status = NewtonStatus::lost;
    Vec c;              // best heights seen (length n-1)
    Evaluation ev;      // evaluation at c
    int iterations = 0;
    double condition = 1.0;
    Vec fnorm_history;
};

// Damped Newton with a trust cap on the step length. Returns the best point
// reached; never throws on trial failures (those shrink the step instead).
NewtonOutcome newton_loop(const ProblemSpec& spec, const EnergyVector& target, const Vec& c0,
                          double tol, int max_iter) {
    const int n = spec.n();
    NewtonOutcome out;
    out.c = c0;
    try {
        out.ev = evaluate(spec, c0, target);
    } catch (const BaseNotConverged&) {
        out.status = NewtonStatus::lost;
        return out;
    }
    out.fnorm_history.push_back(out.ev.fnorm_all);

    for (int iter = 1; iter <= max_iter; ++iter) {
        if (out.ev.fnorm_all <= tol) {
            out.status = NewtonStatus::converged;
            out.iterations = iter - 1;
            return out;
        }
        const JacobianResult jac = variational_jacobian(spec, out.ev.base);
        out.condition = jac.condition;

        Vec f(n - 1);
        for (int i = 0; i < n - 1; ++i) f[i] = out.ev.base.sigma.sigma[i] - target.sigma[i];
        Vec step;
        if (!solve_linear(jac.m, f, step)) {
            out.status = NewtonStatus::stalled;
            out.iterations = iter - 1;
            return out;
        }
        // Near the admissible boundary the sensitivity degenerates and the
        // raw Newton direction can be enormous; cap it so damped trials stay
        // in the integrable region.
        const double step_len = max_abs(step);
        if (step_len > 4.0)
            for (auto& s : step) s *= 4.0 / step_len;

        const double sigma_norm = std::max(norm2(out.ev.base.sigma.sigma), 1e-12);
        bool accepted = false;
        for (double lam = 1.0; lam >= 1.0 / 256.0; lam *= 0.5) {
            Vec c_try = out.c;
            for (int i = 0; i < n - 1; ++i) c_try[i] -= lam * step[i];
            Evaluation ev_try;
            try {
                ev_try = evaluate(spec, c_try, target);
            } catch (const BaseNotConverged&) {
                continue;
            }
            Vec dsig(n);
            for (int i = 0; i < n; ++i)
                dsig[i] = ev_try.base.sigma.sigma[i] - out.ev.base.sigma.sigma[i];
            if (norm2(dsig) > 0.5 * sigma_norm && ev_try.fnorm >= tol) continue;
            if (ev_try.fnorm < out.ev.fnorm || ev_try.fnorm_all <= tol) {
                out.c = c_try;
                out.ev = std::move(ev_try);
                out.fnorm_history.push_back(out.ev.fnorm_all);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.status = NewtonStatus::stalled;
            out.iterations = iter;
            return out;
        }
        // Plateau: give up early when four accepted steps barely move |F|.
        const size_t h = out.fnorm_history.size();
        if (h >= 5 && out.fnorm_history[h - 1] > 0.99 * out.fnorm_history[h - 5]) {
            out.status = NewtonStatus::stalled;
            out.iterations = iter;
            return out;
        }
    }
    out.status =
        (out.ev.fnorm_all <= tol) ? NewtonStatus::converged : NewtonStatus::stalled;
    out.iterations = max_iter;
    return out;
}

// Radial projection onto the admissible surface: the ray through sigma meets
// Lambda_I = 0 where rho = (2 sum g_i s_i) / (s^T A s).
bool project_to_surface(const ProblemSpec& spec, Vec& sigma) {
    const int n = spec.n();
    double lin = 0.0, quad = 0.0;
    for (int i = 0; i < n; ++i) {
        lin += 2.0 * (spec.beta.beta[i] + 2.0) * sigma[i];
        for (int j = 0; j < n; ++j) quad += spec.a.entries(i, j) * sigma[i] * sigma[j];
    }
    if (!(lin > 0.0) || !(quad > 0.0)) return false;
    const double rho = lin / quad;
    for (auto& s : sigma) s *= rho;
    return true;
}

} // namespace

ShootingResult shoot(const ProblemSpec& spec, const EnergyVector& target,
                     const std::optional<InitialHeights>& guess, double shoot_tol) {
    const int n = spec.n();
    if (static_cast<int>(target.sigma.size()) != n)
        throw ValidationError("target length does not match the system size");

    const Pi2Result memb = pi2_membership(target, spec.a, spec.beta, 1e-9);
    if (memb.status == Pi2Status::outside)
        throw TargetNotInPi2("target rejected: " + memb.reason);

    ShootingResult res;
    res.target = target;
    res.boundary_warning = (memb.status == Pi2Status::on_boundary) ||
                           (n > 1 && memb.lambda_min_proper <
                                         1e-3 * lambda_scale(target, spec.a));
    const int max_iter = res.boundary_warning ? 160 : 40;

    Vec c0;
    if (guess) {
        if (static_cast<int>(guess->c.size()) == n) {
            c0.assign(guess->c.begin(), guess->c.end() - 1);
        } else if (static_cast<int>(guess->c.size()) == n - 1) {
            c0 = guess->c;
        } else {
            throw ValidationError("guess must have length n or n-1");
        }
    } else if (n > 1) {
        c0 = default_guess(spec, target);
    }

    auto finish = [&](NewtonOutcome&& out, int total_iters) {
        res.c.c = out.c;
        res.c.c.push_back(0.0);
        res.achieved = out.ev.base.sigma;
        res.profile = std::move(out.ev.base);
        res.iterations = total_iters;
        res.condition = out.condition;
        res.fnorm_history = std::move(out.fnorm_history);
        res.converged = res.fnorm_history.empty()
                            ? false
                            : res.fnorm_history.back() <= shoot_tol;
        return res;
    };

    if (n == 1) {
        NewtonOutcome out = newton_loop(spec, target, {}, shoot_tol, 0);
        if (out.status == NewtonStatus::lost)
            throw IntegrationFailed({0.0}, "normalized scalar profile does not integrate");
        return finish(std::move(out), 0);
    }

    NewtonOutcome direct = newton_loop(spec, target, c0, shoot_tol, max_iter);
    if (direct.status == NewtonStatus::converged)
        return finish(std::move(direct), direct.iterations);

    // Homotopy fallback: walk the target along the admissible surface,
    // warm-starting Newton at each waypoint. A stalled Newton iterate often
    // sits on a degenerate plateau of the energy map, so anchor at the
    // origin of height space (a generic interior point) when it integrates.
    int total = direct.iterations;
    Vec c_cur(n - 1, 0.0);
    Vec sigma_anchor;
    try {
        const Evaluation ev0 = evaluate(spec, c_cur, target);
        sigma_anchor = ev0.base.sigma.sigma;
    } catch (const BaseNotConverged&) {
        if (direct.status == NewtonStatus::lost) {
            Vec full(c0);
            full.push_back(0.0);
            throw IntegrationFailed(full, "no integrable starting point found");
        }
        c_cur = direct.c;
        sigma_anchor = direct.ev.base.sigma.sigma;
    }
    const Vec& sigma_goal = target.sigma;
    double s = 0.0, ds = 0.25;
    const int total_cap = 60 * max_iter;
    NewtonOutcome last = std::move(direct);
    while (s < 1.0) {
        if (total > total_cap)
            throw MaxIterations("homotopy budget exhausted (residual " +
                                std::to_string(last.ev.fnorm_all) + ")");
        const double s_try = std::min(1.0, s + ds);
        Vec sigma_w(n);
        for (int i = 0; i < n; ++i)
            sigma_w[i] = (1.0 - s_try) * sigma_anchor[i] + s_try * sigma_goal[i];
        bool ok = project_to_surface(spec, sigma_w);
        if (ok && s_try < 1.0)
            ok = pi2_membership(EnergyVector{sigma_w}, spec.a, spec.beta, 1e-11).status !=
                 Pi2Status::outside;
        NewtonOutcome step_out;
        if (ok) {
            const double wp_tol = (s_try >= 1.0) ? shoot_tol : 1e-6;
            step_out = newton_loop(spec, EnergyVector{sigma_w}, c_cur, wp_tol, 25);
            total += std::max(step_out.iterations, 1);
            ok = step_out.status == NewtonStatus::converged;
        }
        if (ok) {
            c_cur = step_out.c;
            s = s_try;
            ds = std::min(0.3, ds * 1.6);
            if (s >= 1.0) {
                res.boundary_warning =
                    res.boundary_warning || memb.lambda_min_proper <
                                                1e-3 * lambda_scale(target, spec.a);
                return finish(std::move(step_out), total);
            }
            last = std::move(step_out);
        } else {
            ds *= 0.5;
            if (ds < 1.0 / 1024.0)
                throw MaxIterations(
                    "homotopy step collapsed at s = " + std::to_string(s) +
                    " (near-boundary targets may need a larger t_max window)");
        }
    }
    throw MaxIterations("homotopy terminated without reaching the target");
}

UniquenessReport uniqueness_probe(const ProblemSpec& spec, const EnergyVector& target,
                                  int trials, std::uint64_t seed, double shoot_tol) {
    UniquenessReport rep;
    const int n = spec.n();
    std::uint64_t state = seed ^ 0x9b1a7de3c5f20e47ull;
    const Vec base_guess = (n > 1) ? default_guess(spec, target) : Vec{};
    for (int t = 0; t < trials; ++t) {
        Vec g = base_guess;
        if (t > 0)
            for (auto& x : g) x += 2.0 * uniform01(state) - 1.0;
        std::optional<InitialHeights> guess;
        if (!g.empty()) guess = InitialHeights{g};
        rep.results.push_back(shoot(spec, target, guess, shoot_tol));
    }
    rep.spread = 0.0;
    for (size_t a = 0; a < rep.results.size(); ++a)
        for (size_t b = a + 1; b < rep.results.size(); ++b)
            for (int i = 0; i < n; ++i)
                rep.spread = std::max(rep.spread, std::fabs(rep.results[a].c.c[i] -
                                                            rep.results[b].c.c[i]));
    rep.consistent = rep.spread <= 1e-5;
    return rep;
}

ProblemSpec perturbed_spec(const ProblemSpec& spec, double epsilon) {
    if (epsilon == 0.0) return spec;
    Mat raw = spec.a.entries;
    for (int i = 0; i < spec.n(); ++i) raw(i, i) += epsilon;
    ProblemSpec out = spec;
    out.a = validate_matrix(raw);
    return out;
}

ContinuationResult continuation_shoot(const ProblemSpec& spec, const EnergyVector& target,
                                      const Vec& epsilon_ladder, double shoot_tol) {
    if (epsilon_ladder.empty()) throw ValidationError("epsilon ladder is empty");
    const int n = spec.n();

    ContinuationResult out;
    std::optional<InitialHeights> warm;
    for (double eps : epsilon_ladder) {
        const ProblemSpec pspec = perturbed_spec(spec, eps);
        Vec proj = target.sigma;
        if (!project_to_surface(pspec, proj))
            throw TargetNotInPi2("projection onto the perturbed surface failed");

        ContinuationRung rung;
        rung.epsilon = eps;
        rung.projected_target = EnergyVector{proj};
        rung.result = shoot(pspec, rung.projected_target, warm, shoot_tol);
        warm = rung.result.c;
        out.rungs.push_back(std::move(rung));
    }

    if (out.rungs.size() >= 2) {
        const Vec& ca = out.rungs[out.rungs.size() - 2].result.c.c;
        const Vec& cb = out.rungs.back().result.c.c;
        for (int i = 0; i < n; ++i)
            out.cauchy_gap = std::max(out.cauchy_gap, std::fabs(ca[i] - cb[i]));
    }
    return out;
}

} // namespace liouville

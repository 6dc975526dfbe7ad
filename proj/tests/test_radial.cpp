#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "liouville/errors.hpp"
#include "liouville/oracle.hpp"
#include "liouville/radial_solver.hpp"
#include "test_support.hpp"

using namespace liouville;

namespace {

ProblemSpec scalar_spec(double beta, double tol_step = 1e-10, double tol_energy = 1e-9) {
    Mat unit(1);
    unit(0, 0) = 1.0;
    return make_problem_spec(unit, {beta}, tol_step, tol_energy);
}

ProblemSpec sym_spec() {
    Mat a(2);
    a(0, 0) = a(1, 1) = 2.0;
    a(0, 1) = a(1, 0) = 1.0;
    return make_problem_spec(a, {0.0, 0.0});
}

} // namespace

TEST_CASE("picard start matches the closed form at r0") {
    const ProblemSpec spec = scalar_spec(0.0);
    const PicardLocal loc = picard_local(spec, InitialHeights{{std::log(8.0)}}, 1e-4);
    const ScalarSolution sol{8.0, 0.0};
    CHECK(std::fabs(loc.u[0] - sol.eval(1e-4).u) < 1e-10);
    CHECK(std::fabs(loc.rdu[0] - sol.eval(1e-4).rdu) < 1e-10);
    CHECK(loc.u[0] <= std::log(8.0));
    CHECK(loc.error_bound < 1e-12);
}

TEST_CASE("picard start approaches the center values as r0 -> 0") {
    const ProblemSpec spec = scalar_spec(-0.7);
    const PicardLocal loc = picard_local(spec, InitialHeights{{1.3}}, 1e-8);
    CHECK(loc.u[0] == doctest::Approx(1.3).epsilon(1e-9));
    CHECK(std::fabs(loc.rdu[0]) < 1e-8);
    CHECK(loc.u[0] <= 1.3);
}

TEST_CASE("picard start reduces to the scalar solution on the symmetric system") {
    const ProblemSpec spec = sym_spec();
    const PicardLocal loc = picard_local(spec, InitialHeights{{0.0, 0.0}}, 1e-4);
    // u1 = u2 solves u'' + u'/r + 3 e^u = 0, i.e. the mu = 1 closed form of
    // u'' + u'/r + e^(u + log 3) = 0 shifted by log 3.
    const ScalarSolution sol{3.0, 0.0};
    const double expect = sol.eval(1e-4).u - std::log(3.0);
    CHECK(std::fabs(loc.u[0] - expect) < 1e-12);
    CHECK(std::fabs(loc.u[1] - expect) < 1e-12);
}

TEST_CASE("picard start rejects a too-large radius") {
    const ProblemSpec spec = scalar_spec(0.0);
    CHECK_THROWS_AS(picard_local(spec, InitialHeights{{std::log(8.0)}}, 10.0), R0TooLarge);
}

TEST_CASE("integrate reproduces the mu=8 oracle") {
    const ProblemSpec spec = scalar_spec(0.0);
    const RadialProfile p = integrate(spec, InitialHeights{{std::log(8.0)}});
    REQUIRE(p.converged);
    CHECK(std::fabs(p.sigma.sigma[0] - 4.0) < 1e-8);
    CHECK(std::fabs(p.m[0] - 4.0) < 1e-8);
    CHECK(std::fabs(p.c_const[0] - std::log(8.0)) < 1e-5);
    CHECK(std::fabs(p.diag.c_const_integral[0] - std::log(8.0)) < 1e-6);

    const ScalarSolution sol{8.0, 0.0};
    double worst = 0.0;
    for (size_t k = 0; k < p.grid.size(); ++k)
        worst = std::max(worst, std::fabs(p.u[0][k] - sol.eval_log(p.grid[k]).u));
    CHECK(worst < 1e-8);

    // interpolation between grid points
    for (double t : {-3.123, -0.457, 0.891, 4.777})
        CHECK(std::fabs(p.sample_u(0, t) - sol.eval_log(t).u) < 1e-8);

    // monotone decay of the slope
    for (size_t k = 0; k < p.grid.size(); ++k) {
        CHECK(p.du[0][k] < 0.0);
        if (k) CHECK(p.du[0][k] <= p.du[0][k - 1] + 1e-14);
    }
}

TEST_CASE("integrate handles beta = -1 for any amplitude") {
    const ProblemSpec spec = scalar_spec(-1.0);
    for (double mu : {2.0, 0.3}) {
        const RadialProfile p = integrate(spec, InitialHeights{{std::log(mu)}});
        REQUIRE(p.converged);
        CHECK(std::fabs(p.sigma.sigma[0] - 2.0) < 1e-8);
        CHECK(std::fabs(p.m[0] - 2.0) < 1e-8);
    }
}

TEST_CASE("integrate on the symmetric two-component system") {
    const ProblemSpec spec = sym_spec();
    const RadialProfile p = integrate(spec, InitialHeights{{0.0, 0.0}});
    REQUIRE(p.converged);
    CHECK(std::fabs(p.sigma.sigma[0] - 4.0 / 3.0) < 1e-8);
    CHECK(std::fabs(p.sigma.sigma[1] - 4.0 / 3.0) < 1e-8);
    CHECK(std::fabs(p.diag.lambda_i_residual) < 1e-8);
    CHECK(max_abs(p.diag.energy_cross_residual) < 1e-7);
}

TEST_CASE("compute_energy requadrature agrees with the carried quadrature") {
    const ProblemSpec spec = scalar_spec(0.0);
    const RadialProfile p = integrate(spec, InitialHeights{{std::log(8.0)}});
    const EnergyComputation ec = compute_energy(p, spec);
    CHECK(std::fabs(ec.sigma.sigma[0] - 4.0) < 1e-8);
    CHECK(max_abs(ec.cross_residual) < 1e-6);

    const ProblemSpec spec1 = scalar_spec(-1.0);
    const RadialProfile p1 = integrate(spec1, InitialHeights{{0.0}});
    CHECK(std::fabs(compute_energy(p1, spec1).sigma.sigma[0] - 2.0) < 1e-8);
}

TEST_CASE("scale_profile is exact bookkeeping") {
    const ProblemSpec spec = scalar_spec(0.0);
    const RadialProfile p = integrate(spec, InitialHeights{{std::log(8.0)}});

    const RadialProfile same = scale_profile(p, 1.0);
    CHECK(same.grid == p.grid);
    CHECK(same.u[0] == p.u[0]);

    const RadialProfile doubled = scale_profile(p, 2.0);
    CHECK(doubled.sigma.sigma[0] == p.sigma.sigma[0]); // bit-identical
    const ScalarSolution sol32{32.0, 0.0};
    for (double t : {-2.0, 0.0, 1.5})
        CHECK(std::fabs(doubled.sample_u(0, t) - sol32.eval_log(t).u) < 1e-8);

    const RadialProfile back = scale_profile(doubled, 0.5);
    double worst = 0.0;
    for (size_t k = 0; k < p.grid.size(); ++k) {
        worst = std::max(worst, std::fabs(back.grid[k] - p.grid[k]));
        worst = std::max(worst, std::fabs(back.u[0][k] - p.u[0][k]));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("scaling covariance of integrate") {
    const ProblemSpec spec = sym_spec();
    const Vec c = {0.4, -0.2};
    const RadialProfile pa = integrate(spec, InitialHeights{c});
    REQUIRE(pa.converged);
    const double delta = 2.0;
    Vec cb = c;
    for (int i = 0; i < 2; ++i) cb[i] += 2.0 * std::log(delta);
    const RadialProfile pb = integrate(spec, InitialHeights{cb});
    REQUIRE(pb.converged);
    const RadialProfile ps = scale_profile(pa, delta);
    const double lo = std::max(pb.t_front(), ps.t_front());
    const double hi = std::min(pb.t_back(), ps.t_back());
    double worst = 0.0;
    for (size_t k = 0; k < pb.grid.size(); ++k) {
        const double t = pb.grid[k];
        if (t < lo || t > hi) continue;
        for (int i = 0; i < 2; ++i)
            worst = std::max(worst, std::fabs(pb.u[i][k] - ps.sample_u(i, t)));
    }
    CHECK(worst < 1e-9); // 10 x tol_step
}

TEST_CASE("residual defect classifies profiles") {
    const ProblemSpec spec = scalar_spec(0.0);

    // Exact profile sampled from the closed form on a uniform grid.
    const ScalarSolution sol{8.0, 0.0};
    RadialProfile exact;
    exact.coupling = spec.a;
    exact.beta = spec.beta;
    exact.c0 = {std::log(8.0)};
    exact.u.assign(1, Vec{});
    exact.du.assign(1, Vec{});
    const double h = 0.05;
    for (double t = -8.0; t <= 8.0 + 1e-12; t += h) {
        const auto pt = sol.eval_log(t);
        exact.grid.push_back(t);
        exact.u[0].push_back(pt.u);
        exact.du[0].push_back(pt.rdu);
    }
    CHECK(residual(exact, spec) < h * h * 4.0);

    // Converged numerical output obeys the step-control contract.
    const RadialProfile p = integrate(spec, InitialHeights{{std::log(8.0)}});
    CHECK(residual(p, spec) < 100.0 * spec.tol_step);

    // A constant fake has strictly positive defect.
    RadialProfile fake = exact;
    for (auto& v : fake.u[0]) v = 0.5;
    for (auto& v : fake.du[0]) v = 0.0;
    CHECK(residual(fake, spec) > 0.1);
}

TEST_CASE("tightening tolerances and halving r0 barely moves the profile") {
    const ProblemSpec spec = sym_spec();
    const Vec c = {0.3, 0.0};
    const RadialProfile pa = integrate(spec, InitialHeights{c});
    ProblemSpec tight = spec;
    tight.start_scale = 0.5;
    tight.tol_step /= 10.0;
    tight.tol_energy /= 10.0;
    const RadialProfile pb = integrate(tight, InitialHeights{c});
    double worst = 0.0;
    for (size_t k = 0; k < pa.grid.size(); ++k) {
        const double t = pa.grid[k];
        if (t < pb.t_front() || t > pb.t_back()) continue;
        for (int i = 0; i < 2; ++i)
            worst = std::max(worst, std::fabs(pa.u[i][k] - pb.sample_u(i, t)));
    }
    CHECK(worst < 10.0 * spec.tol_step);
}

TEST_CASE("compute_energy flags a dominating tail") {
    const ProblemSpec spec = scalar_spec(0.0);
    const RadialProfile p = integrate(spec, InitialHeights{{std::log(8.0)}});
    ProblemSpec strict = spec;
    strict.tol_energy = 1e-12; // the stored profile stopped at a ~1e-9 tail
    CHECK_THROWS_AS(compute_energy(p, strict), TailDominates);
}

TEST_CASE("non-convergence at t_max is a value, not an error") {
    Mat a(2);
    a(0, 1) = a(1, 0) = 1.0;
    ProblemSpec spec = make_problem_spec(a, {0.0, 0.0}, 1e-10, 1e-9, -18.0, 1.0);
    const RadialProfile p = integrate(spec, InitialHeights{{0.0, 0.0}});
    CHECK_FALSE(p.converged); // window far too short to settle
    CHECK_THROWS_AS(compute_energy(p, spec), BaseNotConverged);
}

TEST_CASE("defect contract holds across random instances") {
    std::uint64_t state = 24680;
    int done = 0;
    for (int trial = 0; trial < 40 && done < 20; ++trial) {
        const int n = 2 + trial % 3;
        Mat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 0.3 + 1.2 * uniform01(state);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                m(i, j) = m(j, i) = (uniform01(state) < 0.3) ? 0.0 : uniform01(state);
        Vec beta(n), c(n);
        for (int i = 0; i < n; ++i) {
            beta[i] = -1.9 + 4.9 * uniform01(state);
            c[i] = -3.0 + 6.0 * uniform01(state);
        }
        ProblemSpec spec;
        try {
            spec = make_problem_spec(m, beta);
        } catch (const Error&) {
            continue;
        }
        const RadialProfile p = integrate(spec, InitialHeights{c});
        if (!p.converged) continue;
        ++done;
        CHECK(residual(p, spec) <= 100.0 * spec.tol_step);
    }
    CHECK(done == 20);
}

TEST_CASE("pohozaev residual vanishes on an asymmetric instance") {
    Mat a(2);
    a(0, 0) = 1.5; a(0, 1) = 0.4;
    a(1, 0) = 0.4; a(1, 1) = 0.9;
    const ProblemSpec spec = make_problem_spec(a, {0.8, -0.6});
    const RadialProfile p = integrate(spec, InitialHeights{{1.1, -0.4}});
    REQUIRE(p.converged);
    const double scale = lambda_scale(p.sigma, spec.a);
    CHECK(std::fabs(p.diag.lambda_i_residual) < 1e-6 * scale);
    CHECK(lambda_j({0}, p.sigma, spec.a, spec.beta) > 0.0);
    CHECK(lambda_j({1}, p.sigma, spec.a, spec.beta) > 0.0);
    for (int i = 0; i < 2; ++i) CHECK(p.m[i] > spec.beta.beta[i] + 2.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "liouville/errors.hpp"
#include "liouville/linearized.hpp"
#include "liouville/oracle.hpp"

using namespace liouville;

namespace {

ProblemSpec scalar_spec(double beta) {
    Mat unit(1);
    unit(0, 0) = 1.0;
    return make_problem_spec(unit, {beta});
}

ProblemSpec sym_spec(double beta = 0.0) {
    Mat a(2);
    a(0, 0) = a(1, 1) = 2.0;
    a(0, 1) = a(1, 0) = 1.0;
    return make_problem_spec(a, {beta, beta});
}

} // namespace

TEST_CASE("mode-0 with zero data stays zero") {
    const ProblemSpec spec = scalar_spec(0.0);
    const RadialProfile p = integrate(spec, InitialHeights{{std::log(8.0)}});
    const LinearizedProfile lp = solve_mode0(p, {0.0});
    for (double v : lp.phi[0]) CHECK(v == 0.0);
}

TEST_CASE("mode-0 kernel data reproduces the scaling direction") {
    const ProblemSpec spec = scalar_spec(0.0);
    const RadialProfile p = integrate(spec, InitialHeights{{std::log(8.0)}});
    const LinearizedProfile lp = solve_mode0(p, {2.0});
    double worst = 0.0;
    for (size_t k = 0; k < p.grid.size(); ++k)
        worst = std::max(worst, std::fabs(lp.phi[0][k] - (p.du[0][k] + 2.0)));
    CHECK(worst < 1e-8);

    // Against the closed form phi = 2 (1 - r^2) / (1 + r^2).
    for (size_t k = 0; k < p.grid.size(); k += 7) {
        const double r2 = std::exp(2.0 * p.grid[k]);
        CHECK(std::fabs(lp.phi[0][k] - 2.0 * (1.0 - r2) / (1.0 + r2)) < 1e-8);
    }

    CHECK(kernel_partial_integral_check(p, lp) < 1e-7);

    // Total moment vanishes: the partial integral equals the decaying weight.
    CHECK(std::fabs(lp.moments[0] + lp.tail_moments[0]) < 1e-7);
}

TEST_CASE("mode-0 solves superpose") {
    const ProblemSpec spec = sym_spec();
    const RadialProfile p = integrate(spec, InitialHeights{{0.3, -0.1}});
    REQUIRE(p.converged);
    const LinearizedProfile a = solve_mode0(p, {1.0, 0.0});
    const LinearizedProfile b = solve_mode0(p, {0.0, 1.0});
    const LinearizedProfile ab = solve_mode0(p, {1.0, 1.0});
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (size_t k = 0; k < p.grid.size(); ++k)
            worst = std::max(worst,
                             std::fabs(ab.phi[i][k] - a.phi[i][k] - b.phi[i][k]));
    CHECK(worst < 1e-9);
}

TEST_CASE("mode-0 solutions grow at most logarithmically") {
    const ProblemSpec spec = sym_spec();
    const RadialProfile p = integrate(spec, InitialHeights{{0.5, 0.0}});
    const LinearizedProfile lp = solve_mode0(p, {1.0, 0.0});
    CHECK(lp.growth_bound_c < 1e3);
    // The slope settles: d(phi)/dt converges to a constant.
    const double t_end = p.t_back();
    size_t ka = p.points() - 1, kb = p.points() - 1;
    for (size_t k = 0; k < p.points(); ++k)
        if (p.grid[k] < t_end - 2.0) ka = k;
    for (int i = 0; i < 2; ++i)
        CHECK(std::fabs(lp.dphi[i][kb] - lp.dphi[i][ka]) < 1e-5);
}

TEST_CASE("variational jacobian is empty for n = 1") {
    const ProblemSpec spec = scalar_spec(0.0);
    const JacobianResult j = variational_jacobian(spec, InitialHeights{{0.0}});
    CHECK(j.m.size() == 0);
}

TEST_CASE("variational jacobian matches finite differences") {
    const ProblemSpec spec = sym_spec();
    const Vec c = {0.0, 0.0};
    const JacobianResult j = variational_jacobian(spec, InitialHeights{c});
    REQUIRE(j.m.size() == 1);
    const double h = 1e-4;
    const RadialProfile pp = integrate(spec, InitialHeights{{h, 0.0}});
    const RadialProfile pm = integrate(spec, InitialHeights{{-h, 0.0}});
    const double fd = (pp.sigma.sigma[0] - pm.sigma.sigma[0]) / (2.0 * h);
    CHECK(std::fabs(j.m(0, 0) - fd) < 1e-4 * std::fabs(fd));
    CHECK(j.smallest_singular_value > 0.0);
}

TEST_CASE("row-sum identity of the full sensitivity") {
    Mat a(3);
    a(0, 0) = 1.2; a(0, 1) = 0.5; a(0, 2) = 0.2;
    a(1, 0) = 0.5; a(1, 1) = 1.0; a(1, 2) = 0.6;
    a(2, 0) = 0.2; a(2, 1) = 0.6; a(2, 2) = 1.4;
    const ProblemSpec spec = make_problem_spec(a, {0.4, -0.3, 0.9});
    const InitialHeights c{{0.2, -0.5, 0.0}};
    const RadialProfile p = integrate(spec, c);
    REQUIRE(p.converged);
    const JacobianResult j = variational_jacobian(spec, p);
    for (int m = 0; m < 2; ++m) {
        double acc = 0.0, scale = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double w = p.m[i] - (spec.beta.beta[i] + 2.0);
            acc += w * j.sensitivity[i][m];
            scale += std::fabs(w * j.sensitivity[i][m]);
        }
        CHECK(std::fabs(acc) < 1e-5 * std::max(1.0, scale));
    }
}

TEST_CASE("jacobian permutes with the indices") {
    Mat a(3);
    a(0, 0) = 1.1; a(0, 1) = 0.4; a(0, 2) = 0.3;
    a(1, 0) = 0.4; a(1, 1) = 0.9; a(1, 2) = 0.5;
    a(2, 0) = 0.3; a(2, 1) = 0.5; a(2, 2) = 1.3;
    const Vec beta = {0.2, -0.4, 0.7};
    const Vec c = {0.3, -0.2, 0.0};
    const ProblemSpec spec = make_problem_spec(a, beta);
    const JacobianResult j = variational_jacobian(spec, InitialHeights{c});

    // Swap the first two indices (the last stays the normalized one).
    Mat pa(3);
    const int perm[3] = {1, 0, 2};
    Vec pbeta(3), pc(3);
    for (int i = 0; i < 3; ++i) {
        pbeta[i] = beta[perm[i]];
        pc[i] = c[perm[i]];
        for (int k = 0; k < 3; ++k) pa(i, k) = a(perm[i], perm[k]);
    }
    const ProblemSpec pspec = make_problem_spec(pa, pbeta);
    const JacobianResult pj = variational_jacobian(pspec, InitialHeights{pc});
    for (int i = 0; i < 2; ++i)
        for (int m = 0; m < 2; ++m)
            CHECK(pj.m(i, m) == doctest::Approx(j.m(perm[i], perm[m])).epsilon(1e-6));
}

TEST_CASE("mode k >= 1 basics and the translation direction") {
    const ProblemSpec spec = scalar_spec(0.0);
    const RadialProfile p = integrate(spec, InitialHeights{{std::log(8.0)}});

    CHECK_THROWS_AS(solve_mode_k(p, 0, {1.0}), InvalidMode);

    const LinearizedProfile zero = solve_mode_k(p, 1, {0.0});
    for (double v : zero.phi[0]) CHECK(v == 0.0);

    // Seeded from u''(0) = -mu/2 the mode-1 solution is u'(r) itself; compare
    // r phi against r u'. The comparison window stops at r ~ e^5: beyond that
    // the integration's roundoff floor, carried by the growing r^k branch,
    // dominates the e^{2t}-amplified difference for any forward integrator.
    const LinearizedProfile lp = solve_mode_k(p, 1, {-4.0});
    double worst = 0.0;
    for (size_t k = 0; k < p.grid.size(); ++k) {
        if (p.grid[k] > 5.0) break;
        const double rphi = lp.phi[0][k] * std::exp(p.grid[k]);
        worst = std::max(worst, std::fabs(rphi - p.du[0][k]));
    }
    CHECK(worst < 1e-7);
    CHECK(mode_residual(p, lp) < 1e-7);
    CHECK(lp.envelope_bounded);

    // At beta = -1 the regular mode-1 branch escapes the envelope.
    const ProblemSpec spec1 = scalar_spec(-1.0);
    const RadialProfile p1 = integrate(spec1, InitialHeights{{std::log(2.0)}});
    const LinearizedProfile lp1 = solve_mode_k(p1, 1, {1.0});
    CHECK(lp1.envelope_factor >= 1e3);
    CHECK_FALSE(lp1.envelope_bounded);
}

TEST_CASE("comparison function sign conditions") {
    const ProblemSpec spec1 = scalar_spec(-1.0);
    const RadialProfile p1 = integrate(spec1, InitialHeights{{std::log(2.0)}});
    const ComparisonReport rep = comparison_function_check(p1, 2);
    CHECK(rep.f_positive);
    CHECK(rep.margin_negative);
    CHECK(rep.worst_margin < 0.0);
    CHECK(rep.diverges_at_zero);
    CHECK(rep.diverges_at_infinity);
    CHECK(rep.all_ok());

    const ProblemSpec spec0 = scalar_spec(0.0);
    const RadialProfile p0 = integrate(spec0, InitialHeights{{0.0}});
    CHECK_THROWS_AS(comparison_function_check(p0, 2), BetaNotNegative);

    const ProblemSpec spec2 = sym_spec(-0.5);
    const RadialProfile p2 = integrate(spec2, InitialHeights{{0.0, 0.0}});
    CHECK(comparison_function_check(p2, 3).all_ok());
}

TEST_CASE("linearized solves demand a converged base") {
    Mat a(2);
    a(0, 1) = a(1, 0) = 1.0;
    ProblemSpec spec = make_problem_spec(a, {0.0, 0.0}, 1e-10, 1e-9, -18.0, 1.0);
    const RadialProfile p = integrate(spec, InitialHeights{{0.0, 0.0}});
    REQUIRE_FALSE(p.converged);
    CHECK_THROWS_AS(solve_mode0(p, {1.0, 0.0}), BaseNotConverged);
    CHECK_THROWS_AS(variational_jacobian(spec, p), BaseNotConverged);
}

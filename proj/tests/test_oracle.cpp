#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "liouville/oracle.hpp"
#include "test_support.hpp"

using namespace liouville;

TEST_CASE("closed form at hand-checked points") {
    const ScalarSolution s8{8.0, 0.0};
    CHECK(s8.kappa() == doctest::Approx(1.0));
    CHECK(s8.eval(0.0).u == doctest::Approx(std::log(8.0)));
    CHECK(s8.eval(0.0).rdu == 0.0);
    CHECK(s8.eval(1.0).u == doctest::Approx(std::log(2.0)));

    const ScalarSolution s2{2.0, -1.0};
    CHECK(s2.kappa() == doctest::Approx(1.0));
    CHECK(s2.eval(2.0).u == doctest::Approx(std::log(2.0) - 2.0 * std::log(3.0)));
}

TEST_CASE("closed form satisfies the scalar equation (finite differences)") {
    for (const auto& [mu, beta] : {std::pair{8.0, 0.0}, {2.0, -1.0}, {5.0, 1.3}, {0.3, -1.7}}) {
        const ScalarSolution s{mu, beta};
        auto u = [&](double r) { return s.eval(r).u; };
        const double h = 1e-4;
        for (double r : {0.3, 0.9, 2.0, 7.0}) {
            const double upp = testutil::second_diff(u, r, h);
            const double up = (u(r + h) - u(r - h)) / (2.0 * h);
            const double defect = upp + up / r + std::pow(r, beta) * std::exp(u(r));
            // second-difference truncation ~ h^2 * u''''
            CHECK(std::fabs(defect) < 1e-5);
        }
    }
}

TEST_CASE("energy is 2(2+beta) for every mu") {
    for (const auto& [mu, beta] : {std::pair{8.0, 0.0}, {1.0, 0.0}, {0.1, -0.5}, {100.0, -1.5},
                                   {3.0, 2.0}}) {
        const ScalarSolution s{mu, beta};
        // In t = log r the integrand is e^((2+beta) t + u); the window covers
        // the mass to far below the quadrature tolerance.
        auto f = [&](double t) { return std::exp((beta + 2.0) * t + s.eval_log(t).u); };
        const double lo = -300.0 / (beta + 2.0), hi = 300.0 / (beta + 2.0);
        const double q = testutil::integrate(f, lo, hi, 1e-11);
        CHECK(std::fabs(q - forced_energy(beta)) < 1e-8);
    }
}

TEST_CASE("forced energy values and the beta -> -2 limit") {
    CHECK(forced_energy(0.0) == doctest::Approx(4.0));
    CHECK(forced_energy(-1.0) == doctest::Approx(2.0));
    CHECK(forced_energy(-1.999999) < 1e-5);
}

TEST_CASE("slope approaches -2(2+beta) at infinity") {
    const ScalarSolution s{8.0, 0.0};
    CHECK(s.eval(1e8).rdu == doctest::Approx(-4.0).epsilon(1e-12));
    const ScalarSolution t{2.0, -1.0};
    CHECK(t.eval(1e10).rdu == doctest::Approx(-2.0).epsilon(1e-9));
}

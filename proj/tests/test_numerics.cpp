#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "liouville/linalg.hpp"
#include "liouville/stepper.hpp"

using namespace liouville;

TEST_CASE("inverse and determinant on a 3x3") {
    Mat a(3);
    a(0, 0) = 2;  a(0, 1) = 1;   a(0, 2) = 0;
    a(1, 0) = 1;  a(1, 1) = 3;   a(1, 2) = 0.5;
    a(2, 0) = 0;  a(2, 1) = 0.5; a(2, 2) = 1;
    Mat inv;
    REQUIRE(invert(a, inv));
    const Mat id = mat_mul(inv, a);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::fabs(id(i, j) - (i == j ? 1.0 : 0.0)) < 1e-13);
    // det by cofactor expansion: 2(3 - 0.25) - 1(1 - 0) = 4.5
    CHECK(determinant(a) == doctest::Approx(4.5).epsilon(1e-12));
}

TEST_CASE("singular values of a diagonal-ish matrix") {
    Mat a(2);
    a(0, 0) = 3.0;
    a(1, 1) = 0.5;
    const Vec sv = singular_values(a);
    CHECK(sv[0] == doctest::Approx(3.0));
    CHECK(sv[1] == doctest::Approx(0.5));
}

TEST_CASE("solve_linear recovers a known solution") {
    Mat a(2);
    a(0, 0) = 4; a(0, 1) = 1;
    a(1, 0) = 1; a(1, 1) = 3;
    Vec x0 = {1.5, -2.0};
    Vec b = mat_vec(a, x0), x;
    REQUIRE(solve_linear(a, b, x));
    CHECK(std::fabs(x[0] - x0[0]) < 1e-13);
    CHECK(std::fabs(x[1] - x0[1]) < 1e-13);
}

TEST_CASE("quintic hermite reproduces a quintic polynomial exactly") {
    auto f = [](double x) { return ((x - 2) * x + 3) * x * x * x - 7 * x + 1; };
    auto f1 = [](double x) { return 5 * x * x * x * x - 8 * x * x * x + 9 * x * x - 7; };
    auto f2 = [](double x) { return 20 * x * x * x - 24 * x * x + 18 * x; };
    const double a = 0.3, b = 1.7, h = b - a;
    for (double th : {0.1, 0.25, 0.5, 0.77, 0.9}) {
        const double x = a + th * h;
        const double v = hermite5(th, f(a), f1(a) * h, f2(a) * h * h, f(b), f1(b) * h,
                                  f2(b) * h * h);
        const double d1 = hermite5_d1(th, f(a), f1(a) * h, f2(a) * h * h, f(b), f1(b) * h,
                                      f2(b) * h * h) / h;
        const double d2 = hermite5_d2(th, f(a), f1(a) * h, f2(a) * h * h, f(b), f1(b) * h,
                                      f2(b) * h * h) / (h * h);
        CHECK(v == doctest::Approx(f(x)).epsilon(1e-12));
        CHECK(d1 == doctest::Approx(f1(x)).epsilon(1e-11));
        CHECK(d2 == doctest::Approx(f2(x)).epsilon(1e-10));
    }
}

TEST_CASE("dp45 integrates exponential growth to high accuracy") {
    auto rhs = [](double, const Vec& y, Vec& dy) { dy[0] = y[0]; };
    StepperOptions opt;
    opt.tol = 1e-11;
    double last_t = 0.0, last_y = 1.0;
    integrate_dp45(rhs, 0.0, {1.0}, 3.0, opt, [&](double t, const Vec& y, const Vec&) {
        last_t = t;
        last_y = y[0];
        return StepFlow::proceed;
    });
    CHECK(last_t == doctest::Approx(3.0));
    CHECK(std::fabs(last_y - std::exp(3.0)) < 1e-8);
}

TEST_CASE("dp45 lands exactly on checkpoints") {
    auto rhs = [](double t, const Vec&, Vec& dy) { dy[0] = std::cos(t); };
    Vec cps = {0.7, 1.1, 2.0};
    StepperOptions opt;
    opt.tol = 1e-10;
    opt.checkpoints = &cps;
    int hits = 0;
    integrate_dp45(rhs, 0.0, {0.0}, 2.0, opt, [&](double t, const Vec& y, const Vec&) {
        for (double cp : cps)
            if (std::fabs(t - cp) < 1e-12) {
                ++hits;
                CHECK(std::fabs(y[0] - std::sin(t)) < 1e-9);
            }
        return StepFlow::proceed;
    });
    CHECK(hits == 3);
}

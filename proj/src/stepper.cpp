#include "liouville/stepper.hpp"

#include <algorithm>
#include <cmath>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b (5th order) minus bhat (embedded 4th order).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

} // namespace

void integrate_dp45(const Rhs& rhs, double t0, const Vec& y0, double t_end,
                    const StepperOptions& opt, const StepObserver& observer) {
    const size_t n = y0.size();
    Vec y = y0, ynew(n), ytmp(n);
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    double t = t0;

    rhs(t, y, k1);

    double h = opt.h_init;
    if (h <= 0.0) {
        const double d0 = max_abs(k1);
        h = std::clamp(0.01 / (d0 + 1e-3), 1e-8, opt.h_max);
    }

    size_t next_cp = 0;
    if (opt.checkpoints)
        while (next_cp < opt.checkpoints->size() && (*opt.checkpoints)[next_cp] <= t + 1e-14)
            ++next_cp;

    double err_prev = 1.0;
    long steps = 0;
    while (t < t_end - 1e-14) {
        if (++steps > opt.max_steps) throw StepUnderflow("step budget exhausted");
        h = std::min(h, opt.h_max);
        bool hit_cp = false;
        double t_target = t_end;
        if (opt.checkpoints && next_cp < opt.checkpoints->size())
            t_target = std::min(t_target, (*opt.checkpoints)[next_cp]);
        if (t + h >= t_target - 1e-14) {
            h = t_target - t;
            hit_cp = true;
        }
        if (h < 1e-13 * std::max(1.0, std::fabs(t)))
            throw StepUnderflow("step size underflow at t = " + std::to_string(t));

        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7); // FSAL

        double err2 = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            const double sc =
                opt.tol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            const double r = e / sc;
            err2 += r * r;
        }
        const double err = std::sqrt(err2 / static_cast<double>(n));

        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
            if (hit_cp && opt.checkpoints && next_cp < opt.checkpoints->size() &&
                std::fabs(t - (*opt.checkpoints)[next_cp]) < 1e-12)
                ++next_cp;
            if (observer(t, y, k1) == StepFlow::stop) return;
            const double e_clamped = std::max(err, 1e-10);
            double fac = 0.9 * std::pow(e_clamped, -0.14) * std::pow(err_prev, 0.08);
            err_prev = e_clamped;
            h *= std::clamp(fac, 0.2, 5.0);
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
    }
}

// Quintic Hermite basis on [0,1] matching (value, d/dth, d2/dth2) at both ends.
double hermite5(double th, double f0, double d0, double s0, double f1, double d1, double s1) {
    const double t2 = th * th, t3 = t2 * th, t4 = t3 * th, t5 = t4 * th;
    const double h0 = 1.0 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = th - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    const double g0 = 10 * t3 - 15 * t4 + 6 * t5;
    const double g1 = -4 * t3 + 7 * t4 - 3 * t5;
    const double g2 = 0.5 * t3 - t4 + 0.5 * t5;
    return f0 * h0 + d0 * h1 + s0 * h2 + f1 * g0 + d1 * g1 + s1 * g2;
}

double hermite5_d1(double th, double f0, double d0, double s0, double f1, double d1, double s1) {
    const double t2 = th * th, t3 = t2 * th, t4 = t3 * th;
    const double h0 = -30 * t2 + 60 * t3 - 30 * t4;
    const double h1 = 1.0 - 18 * t2 + 32 * t3 - 15 * t4;
    const double h2 = th - 4.5 * t2 + 6 * t3 - 2.5 * t4;
    const double g0 = 30 * t2 - 60 * t3 + 30 * t4;
    const double g1 = -12 * t2 + 28 * t3 - 15 * t4;
    const double g2 = 1.5 * t2 - 4 * t3 + 2.5 * t4;
    return f0 * h0 + d0 * h1 + s0 * h2 + f1 * g0 + d1 * g1 + s1 * g2;
}

double hermite5_d2(double th, double f0, double d0, double s0, double f1, double d1, double s1) {
    const double t2 = th * th, t3 = t2 * th;
    const double h0 = -60 * th + 180 * t2 - 120 * t3;
    const double h1 = -36 * th + 96 * t2 - 60 * t3;
    const double h2 = 1.0 - 9 * th + 18 * t2 - 10 * t3;
    const double g0 = 60 * th - 180 * t2 + 120 * t3;
    const double g1 = -24 * th + 84 * t2 - 60 * t3;
    const double g2 = 3 * th - 12 * t2 + 10 * t3;
    return f0 * h0 + d0 * h1 + s0 * h2 + f1 * g0 + d1 * g1 + s1 * g2;
}

} // namespace liouville

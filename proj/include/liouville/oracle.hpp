#pragma once

namespace liouville {

/// Closed-form radial solution of the scalar equation
///   u'' + u'/r + r^beta e^u = 0,  u(0) = log(mu):
///   u(r) = log(mu) - 2 log(1 + kappa r^(beta+2)),  kappa = mu / (2 (beta+2)^2).
struct ScalarSolution {
    double mu;   // > 0
    double beta; // > -2

    double kappa() const;

    struct Point {
        double u;   // u(r)
        double rdu; // r u'(r)
    };

    /// Values at radius r >= 0 (r = 0 gives u = log mu, rdu = 0).
    Point eval(double r) const;

    /// Same in the log-radius variable t = log r.
    Point eval_log(double t) const;
};

/// The unique positive root of 2(2+beta) s - s^2 = 0, i.e. the energy every
/// finite-energy scalar solution carries: 2(2+beta).
double forced_energy(double beta);

} // namespace liouville

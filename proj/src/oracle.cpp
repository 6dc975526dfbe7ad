#include "liouville/oracle.hpp"

#include <cmath>

namespace liouville {

double ScalarSolution::kappa() const {
    const double g = beta + 2.0;
    return mu / (2.0 * g * g);
}

ScalarSolution::Point ScalarSolution::eval(double r) const {
    if (r <= 0.0) return {std::log(mu), 0.0};
    return eval_log(std::log(r));
}

ScalarSolution::Point ScalarSolution::eval_log(double t) const {
    const double g = beta + 2.0;
    // w = log(kappa r^g); evaluated in logs so r spans the full double range.
    const double w = std::log(kappa()) + g * t;
    double log1px; // log(1 + kappa r^g)
    if (w > 35.0)
        log1px = w + std::log1p(std::exp(-w));
    else
        log1px = std::log1p(std::exp(w));
    const double frac = 1.0 / (1.0 + std::exp(-w)); // kappa r^g / (1 + kappa r^g)
    Point p;
    p.u = std::log(mu) - 2.0 * log1px;
    p.rdu = -2.0 * g * frac;
    return p;
}

double forced_energy(double beta) { return 2.0 * (2.0 + beta); }

} // namespace liouville

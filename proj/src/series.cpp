#include "liouville/series.hpp"

#include <algorithm>
#include <cmath>

namespace liouville {

namespace {

constexpr int kMaxOrder = 4;
constexpr double kCullFloor = 1e-26;

int order_of(const std::vector<std::uint8_t>& mi) {
    int s = 0;
    for (auto m : mi) s += m;
    return s;
}

} // namespace

SingularStart::SingularStart(const CouplingMatrix& a, const SingularityExponents& beta,
                             const Vec& c, double r0, int iterations)
    : n_(a.n), a_(&a), c_(c), r0_(r0), log_r0_(std::log(r0)) {
    g_.resize(n_);
    ec_.resize(n_);
    for (int j = 0; j < n_; ++j) {
        g_[j] = beta.beta[j] + 2.0;
        ec_[j] = std::exp(c_[j]);
    }

    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j)
            s += a.entries(i, j) * ec_[j] * pow_r0(g_[j]) / (g_[j] * g_[j]);
        eps_ = std::max(eps_, s);
    }

    v_.assign(n_, Series{});
    double delta = 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<Series> ev(n_);
        for (int j = 0; j < n_; ++j) ev[j] = exp3(v_[j]);
        std::vector<Series> next(n_);
        for (int i = 0; i < n_; ++i) {
            Series acc;
            for (int j = 0; j < n_; ++j) {
                const double aij = a.entries(i, j);
                if (aij == 0.0) continue;
                Series contrib = kernel_apply(ev[j], j, 0);
                const double w = -aij * ec_[j];
                for (const auto& [mi, coef] : contrib.terms) acc.terms[mi] += w * coef;
            }
            next[i] = cull(acc, kCullFloor);
        }
        delta = 0.0;
        for (int i = 0; i < n_; ++i) {
            Series diff = next[i];
            for (const auto& [mi, coef] : v_[i].terms) diff.terms[mi] -= coef;
            delta = std::max(delta, eval(diff, true));
        }
        v_ = std::move(next);
    }
    expv_.resize(n_);
    for (int j = 0; j < n_; ++j) expv_[j] = exp3(v_[j]);

    const double contraction_tail = (eps_ < 0.5) ? delta * eps_ / (1.0 - eps_) : 1.0;
    const double trunc = std::pow(eps_, 4) / 24.0;
    err_ = contraction_tail + trunc;
}

double SingularStart::exponent(const std::vector<std::uint8_t>& mi) const {
    double g = 0.0;
    for (int j = 0; j < n_; ++j) g += mi[j] * g_[j];
    return g;
}

double SingularStart::pow_r0(double gamma) const { return std::exp(gamma * log_r0_); }

double SingularStart::eval(const Series& s, bool absolute) const {
    double acc = 0.0;
    for (const auto& [mi, coef] : s.terms)
        acc += (absolute ? std::fabs(coef) : coef) * pow_r0(exponent(mi));
    return acc;
}

double SingularStart::eval_deriv(const Series& s) const {
    double acc = 0.0;
    for (const auto& [mi, coef] : s.terms) {
        const double gamma = exponent(mi);
        acc += coef * gamma * pow_r0(gamma);
    }
    return acc;
}

Series SingularStart::cull(const Series& s, double floor_at_r0) const {
    Series out;
    for (const auto& [mi, coef] : s.terms) {
        if (order_of(mi) > kMaxOrder) continue;
        if (std::fabs(coef) * pow_r0(exponent(mi)) < floor_at_r0) continue;
        out.terms[mi] = coef;
    }
    return out;
}

Series SingularStart::mul(const Series& a, const Series& b, double floor_at_r0) const {
    Series out;
    for (const auto& [ma, ca] : a.terms)
        for (const auto& [mb, cb] : b.terms) {
            std::vector<std::uint8_t> m(n_);
            int ord = 0;
            for (int j = 0; j < n_; ++j) {
                m[j] = static_cast<std::uint8_t>(ma[j] + mb[j]);
                ord += m[j];
            }
            if (ord > kMaxOrder) continue;
            out.terms[m] += ca * cb;
        }
    return cull(out, floor_at_r0);
}

Series SingularStart::exp3(const Series& v) const {
    Series one;
    one.terms[std::vector<std::uint8_t>(n_, 0)] = 1.0;
    Series acc = one;
    Series pw = v;
    double fact = 1.0;
    for (int p = 1; p <= 3; ++p) {
        fact *= p;
        for (const auto& [mi, coef] : pw.terms) acc.terms[mi] += coef / fact;
        if (p < 3) pw = mul(pw, v, kCullFloor);
    }
    return cull(acc, kCullFloor);
}

Series SingularStart::kernel_apply(const Series& s, int j, int k) const {
    Series out;
    for (const auto& [mi, coef] : s.terms) {
        if (order_of(mi) + 1 > kMaxOrder) continue;
        std::vector<std::uint8_t> m = mi;
        m[j] += 1;
        const double q = exponent(m);
        out.terms[m] += coef / (q * (q + 2.0 * k));
    }
    return out;
}

Vec SingularStart::u_at_r0() const {
    Vec u(n_);
    for (int i = 0; i < n_; ++i) u[i] = c_[i] + eval(v_[i]);
    return u;
}

Vec SingularStart::dudt_at_r0() const {
    Vec d(n_);
    for (int i = 0; i < n_; ++i) d[i] = eval_deriv(v_[i]);
    return d;
}

Vec SingularStart::head_sigma() const {
    Vec h(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (const auto& [mi, coef] : expv_[i].terms) {
            const double q = exponent(mi) + g_[i];
            acc += coef * std::exp(c_[i] + q * log_r0_) / q;
        }
        h[i] = acc;
    }
    return h;
}

Vec SingularStart::head_logmoment() const {
    Vec h(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (const auto& [mi, coef] : expv_[i].terms) {
            const double q = exponent(mi) + g_[i];
            acc += coef * std::exp(c_[i] + q * log_r0_) * (log_r0_ / q - 1.0 / (q * q));
        }
        h[i] = acc;
    }
    return h;
}

SingularStart::LinearInit SingularStart::linear_start(int k, const Vec& init,
                                                      int iterations) const {
    const double scale = std::max(1e-300, max_abs(init));
    const double floor = kCullFloor * scale;

    std::vector<Series> phi(n_);
    const std::vector<std::uint8_t> zero(n_, 0);
    for (int i = 0; i < n_; ++i)
        if (init[i] != 0.0) phi[i].terms[zero] = init[i];

    double delta = 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<Series> next(n_);
        for (int i = 0; i < n_; ++i) {
            Series acc;
            if (init[i] != 0.0) acc.terms[zero] = init[i];
            for (int j = 0; j < n_; ++j) {
                const double aij = a_->entries(i, j);
                if (aij == 0.0) continue;
                Series prod = mul(expv_[j], phi[j], floor);
                Series contrib = kernel_apply(prod, j, k);
                const double w = -aij * ec_[j];
                for (const auto& [mi, coef] : contrib.terms) acc.terms[mi] += w * coef;
            }
            next[i] = cull(acc, floor);
        }
        delta = 0.0;
        for (int i = 0; i < n_; ++i) {
            Series diff = next[i];
            for (const auto& [mi, coef] : phi[i].terms) diff.terms[mi] -= coef;
            delta = std::max(delta, eval(diff, true));
        }
        phi = std::move(next);
    }

    LinearInit out;
    out.chi.resize(n_);
    out.dchi.resize(n_);
    out.head_moment.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        out.chi[i] = eval(phi[i]);
        out.dchi[i] = eval_deriv(phi[i]);
        Series prod = mul(expv_[i], phi[i], floor);
        double acc = 0.0;
        for (const auto& [mi, coef] : prod.terms) {
            const double q = exponent(mi) + g_[i] + k;
            acc += coef * std::exp(c_[i] + q * log_r0_) / q;
        }
        out.head_moment[i] = acc;
    }
    out.error_bound = (eps_ < 0.5) ? delta * eps_ / (1.0 - eps_) + err_ * scale : scale;
    return out;
}

double SingularStart::pick_r0(const CouplingMatrix& a, const SingularityExponents& beta,
                              const Vec& c, double eps_target, double r_cap) {
    // Sufficient condition: every term a_ij e^(c_j) r^(g_j) / g_j^2 <= eps/n.
    const int n = a.n;
    double t0 = std::log(r_cap);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double aij = a.entries(i, j);
            if (aij <= 0.0) continue;
            const double g = beta.beta[j] + 2.0;
            const double t = (std::log(eps_target / n) - std::log(aij) - c[j] +
                              2.0 * std::log(g)) /
                             g;
            t0 = std::min(t0, t);
        }
    return std::exp(t0);
}

} // namespace liouville

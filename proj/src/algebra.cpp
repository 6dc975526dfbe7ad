#include "liouville/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "liouville/errors.hpp"

namespace liouville {

std::string subset_to_string(const std::vector<int>& subset) {
    std::ostringstream os;
    os << "{";
    for (size_t k = 0; k < subset.size(); ++k) {
        if (k) os << ",";
        os << subset[k] + 1;
    }
    os << "}";
    return os.str();
}

CouplingMatrix validate_matrix(const Mat& raw) {
    const int n = raw.size();
    if (n == 0) throw ValidationError("coupling matrix is empty");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!std::isfinite(raw(i, j)))
                throw ValidationError("coupling matrix has non-finite entries");

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (raw(i, j) != raw(j, i)) {
                std::ostringstream os;
                os << "a[" << i + 1 << "][" << j + 1 << "] = " << raw(i, j)
                   << " != a[" << j + 1 << "][" << i + 1 << "] = " << raw(j, i);
                throw NotSymmetric(os.str());
            }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (raw(i, j) < 0.0) {
                std::ostringstream os;
                os << "a[" << i + 1 << "][" << j + 1 << "] = " << raw(i, j) << " < 0";
                throw NegativeEntry(os.str());
            }

    // Irreducibility: BFS on the graph with edges where a_ij > 0 (exact
    // comparison; entries are user-given, not computed).
    std::vector<char> seen(n, 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
        const int i = queue.back();
        queue.pop_back();
        for (int j = 0; j < n; ++j)
            if (!seen[j] && i != j && raw(i, j) > 0.0) {
                seen[j] = 1;
                queue.push_back(j);
            }
    }
    std::vector<int> part1, part2, part1_z, part2_z;
    for (int i = 0; i < n; ++i) {
        (seen[i] ? part1 : part2).push_back(i + 1);
        (seen[i] ? part1_z : part2_z).push_back(i);
    }
    if (!part2.empty())
        throw Reducible(part1, part2,
                        "positivity graph splits into " + subset_to_string(part1_z) +
                            " and " + subset_to_string(part2_z));

    const double scale = std::max(1.0, std::pow(max_abs(raw), n));
    const double det = determinant(raw);
    if (std::fabs(det) < 1e-12 * scale) {
        std::ostringstream os;
        os << "determinant " << det << " below 1e-12 x scale " << scale;
        throw Singular(os.str());
    }

    CouplingMatrix out;
    out.n = n;
    out.entries = raw;
    if (!invert(raw, out.inverse)) throw Singular("pivot collapse while inverting");

    const Mat check = mat_mul(out.inverse, raw);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::fabs(check(i, j) - want) > 1e-12 * std::max(1.0, max_abs(raw)))
                throw Singular("inverse verification failed (ill-conditioned matrix)");
        }

    out.positive_diagonal = true;
    for (int i = 0; i < n; ++i)
        if (raw(i, i) <= 0.0) out.positive_diagonal = false;
    return out;
}

SingularityExponents validate_beta(const Vec& beta) {
    for (size_t i = 0; i < beta.size(); ++i) {
        if (!std::isfinite(beta[i]) || beta[i] <= -2.0) {
            std::ostringstream os;
            os << "beta[" << i + 1 << "] = " << beta[i] << " must be > -2";
            throw BetaOutOfRange(os.str());
        }
    }
    return SingularityExponents{beta};
}

double lambda_j(const std::vector<int>& subset, const EnergyVector& sigma,
                const CouplingMatrix& a, const SingularityExponents& beta) {
    if (subset.empty()) throw EmptySubset();
    double lin = 0.0, quad = 0.0;
    for (int i : subset) {
        lin += (beta.beta[i] + 2.0) * sigma.sigma[i];
        for (int j : subset) quad += a.entries(i, j) * sigma.sigma[i] * sigma.sigma[j];
    }
    return 2.0 * lin - quad;
}

double lambda_scale(const EnergyVector& sigma, const CouplingMatrix& a) {
    const double s2 = dot(sigma.sigma, sigma.sigma);
    return std::max(1.0, s2 * max_abs(a.entries));
}

Pi2Result pi2_membership(const EnergyVector& sigma, const CouplingMatrix& a,
                         const SingularityExponents& beta, double tol) {
    const int n = a.n;
    if (n > 16) throw DimensionTooLarge("subset enumeration capped at n <= 16");

    Pi2Result res;
    std::vector<int> full(n);
    for (int i = 0; i < n; ++i) full[i] = i;
    res.lambda_full = lambda_j(full, sigma, a, beta);

    for (int i = 0; i < n; ++i)
        if (!(sigma.sigma[i] > 0.0)) {
            res.status = Pi2Status::outside;
            res.subset = {i};
            res.reason = "sigma" + subset_to_string({i}) + " = " +
                         std::to_string(sigma.sigma[i]) + " not > 0";
            return res;
        }

    if (std::fabs(res.lambda_full) > tol * lambda_scale(sigma, a)) {
        res.status = Pi2Status::outside;
        res.subset = full;
        res.reason = "Lambda_I = " + std::to_string(res.lambda_full) + " not ~ 0";
        return res;
    }

    res.lambda_min_proper = 0.0;
    bool first = true;
    std::vector<int> boundary_subset;
    // All 2^n - 2 proper nonempty subsets.
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<int> sub;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) sub.push_back(i);
        const double lam = lambda_j(sub, sigma, a, beta);
        if (first || lam < res.lambda_min_proper) {
            res.lambda_min_proper = lam;
            first = false;
        }
        if (lam < -tol) {
            res.status = Pi2Status::outside;
            res.subset = sub;
            res.reason = "Lambda_" + subset_to_string(sub) + " = " + std::to_string(lam) + " < 0";
            return res;
        }
        if (lam <= tol && boundary_subset.empty()) boundary_subset = sub;
    }
    if (!boundary_subset.empty()) {
        res.status = Pi2Status::on_boundary;
        res.subset = boundary_subset;
        res.reason = "Lambda_" + subset_to_string(boundary_subset) + " within tol of 0";
        return res;
    }
    res.status = Pi2Status::inside;
    return res;
}

std::vector<SigmaRoot> solve_sigma_last(const Vec& sigma_partial, const CouplingMatrix& a,
                                        const SingularityExponents& beta, double tol) {
    const int n = a.n;
    if (static_cast<int>(sigma_partial.size()) != n - 1)
        throw ValidationError("sigma_partial must have length n-1");
    for (int i = 0; i < n - 1; ++i)
        if (sigma_partial[i] < 0.0)
            throw ValidationError("sigma_partial components must be >= 0");

    // Lambda_I as a polynomial in x = sigma_n:
    //   -a_nn x^2 + B x + C,
    // B = 2(2+beta_n) - 2 sum_{i<n} a_in sigma_i, C = Lambda of the partial block.
    const double ann = a.entries(n - 1, n - 1);
    double b = 2.0 * (beta.beta[n - 1] + 2.0);
    for (int i = 0; i < n - 1; ++i) b -= 2.0 * a.entries(i, n - 1) * sigma_partial[i];
    double c = 0.0;
    for (int i = 0; i < n - 1; ++i) {
        c += 2.0 * (beta.beta[i] + 2.0) * sigma_partial[i];
        for (int j = 0; j < n - 1; ++j) c -= a.entries(i, j) * sigma_partial[i] * sigma_partial[j];
    }

    std::vector<double> roots;
    if (ann == 0.0) {
        if (b == 0.0) throw NoNonnegativeRoot("degenerate linear equation for sigma_n");
        roots.push_back(-c / b);
    } else {
        // a_nn x^2 - B x - C = 0
        const double disc = b * b + 4.0 * ann * c;
        if (disc < 0.0) throw NoNonnegativeRoot("complex roots for sigma_n");
        const double sq = std::sqrt(disc);
        // Stable quadratic formula.
        const double q = -0.5 * (-b + (b >= 0 ? -sq : sq)); // = (b + sign(b) sq)/2
        double x1 = q / ann;
        double x2 = (q != 0.0) ? -c / q : (b * 0.5 + 0.5 * sq) / ann;
        if (x1 > x2) std::swap(x1, x2);
        roots = {x1, x2};
    }

    std::vector<SigmaRoot> out;
    for (double x : roots) {
        if (x < 0.0) continue;
        Vec sig = sigma_partial;
        sig.push_back(x);
        SigmaRoot r;
        r.value = x;
        r.membership = pi2_membership(EnergyVector{sig}, a, beta, tol);
        out.push_back(std::move(r));
    }
    if (out.empty()) throw NoNonnegativeRoot("both roots for sigma_n are negative");
    return out;
}

double uniform01(std::uint64_t& state) {
    // splitmix64 step; top 53 bits as a double in [0,1).
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::vector<EnergyVector> sample_pi2(const CouplingMatrix& a, const SingularityExponents& beta,
                                     int count, std::uint64_t seed, double tol) {
    std::vector<EnergyVector> out;
    if (count <= 0) return out;
    const int n = a.n;
    std::uint64_t state = seed ^ 0x5bf0f5193f3c4a1bull;

    long rejected = 0;
    while (static_cast<int>(out.size()) < count) {
        if (rejected > 1000000) throw SamplingExhausted("rejected 1e6 draws while sampling");
        Vec partial(n - 1);
        for (int i = 0; i < n - 1; ++i) {
            // Lambda_{i} > 0 forces sigma_i < 2(2+beta_i)/a_ii when a_ii > 0.
            const double aii = a.entries(i, i);
            const double hi = (aii > 0.0) ? 2.0 * (beta.beta[i] + 2.0) / aii
                                          : 4.0 * (beta.beta[i] + 2.0);
            partial[i] = hi * uniform01(state);
            if (partial[i] == 0.0) partial[i] = 0.5 * hi;
        }
        std::vector<SigmaRoot> roots;
        try {
            roots = solve_sigma_last(partial, a, beta, tol);
        } catch (const NoNonnegativeRoot&) {
            ++rejected;
            continue;
        }
        bool kept = false;
        for (const auto& r : roots) {
            if (!r.membership.inside()) continue;
            Vec sig = partial;
            sig.push_back(r.value);
            out.push_back(EnergyVector{sig});
            kept = true;
            if (static_cast<int>(out.size()) == count) break;
        }
        if (!kept) ++rejected;
    }
    return out;
}

} // namespace liouville

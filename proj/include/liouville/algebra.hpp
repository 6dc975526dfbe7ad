#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liouville/linalg.hpp"

namespace liouville {

/// Symmetric nonnegative irreducible invertible coupling matrix, with its
/// inverse computed and verified at construction time.
struct CouplingMatrix {
    int n = 0;
    Mat entries;
    Mat inverse;
    bool positive_diagonal = false; // all a_ii > 0 (selects solver guarantees)
};

struct SingularityExponents {
    Vec beta; // each > -2
};

/// Componentwise energies sigma_i = Int_0^inf r^(1+beta_i) e^(u_i) dr.
struct EnergyVector {
    Vec sigma;
};

/// Checks symmetry, nonnegativity, irreducibility (BFS on the positivity
/// graph) and invertibility; throws NotSymmetric / NegativeEntry / Reducible /
/// Singular accordingly.
CouplingMatrix validate_matrix(const Mat& raw);

/// Throws BetaOutOfRange unless every beta_i > -2.
SingularityExponents validate_beta(const Vec& beta);

/// Lambda_J(sigma) = 2 sum_{i in J} (beta_i+2) sigma_i
///                   - sum_{i,j in J} a_ij sigma_i sigma_j.
/// `subset` holds 0-based indices; throws EmptySubset when empty.
double lambda_j(const std::vector<int>& subset, const EnergyVector& sigma,
                const CouplingMatrix& a, const SingularityExponents& beta);

/// Scale used for Lambda residual comparisons: max(1, |sigma|^2 * max|a_ij|).
double lambda_scale(const EnergyVector& sigma, const CouplingMatrix& a);

enum class Pi2Status { inside, on_boundary, outside };

struct Pi2Result {
    Pi2Status status = Pi2Status::outside;
    std::vector<int> subset; // violated / boundary subset (0-based), empty for inside
    std::string reason;      // empty for inside
    double lambda_full = 0.0;
    double lambda_min_proper = 0.0; // min over proper nonempty J (0 when n == 1)

    bool inside() const { return status == Pi2Status::inside; }
};

/// Membership test for the admissible energy hypersurface:
/// inside requires sigma_i > 0, |Lambda_I| <= tol * lambda_scale, and
/// Lambda_J > tol for every proper nonempty J. A nonpositive component or a
/// Lambda_J below -tol is outside; a Lambda_J within [-tol, tol] (with all
/// sigma_i > 0) is on_boundary. Throws DimensionTooLarge for n > 16.
Pi2Result pi2_membership(const EnergyVector& sigma, const CouplingMatrix& a,
                         const SingularityExponents& beta, double tol);

struct SigmaRoot {
    double value = 0.0;
    Pi2Result membership;
};

/// Completes a partial energy vector: solves Lambda_I(sigma) = 0 as a
/// quadratic (linear when a_nn = 0) in sigma_n. Returns the nonnegative roots
/// (at most 2), each tagged with pi2_membership at `tol`; throws
/// NoNonnegativeRoot when none exists.
std::vector<SigmaRoot> solve_sigma_last(const Vec& sigma_partial, const CouplingMatrix& a,
                                        const SingularityExponents& beta, double tol = 1e-9);

/// Rejection-samples `count` members of the admissible hypersurface.
/// Deterministic for a fixed seed; throws SamplingExhausted after 1e6 rejected
/// draws.
std::vector<EnergyVector> sample_pi2(const CouplingMatrix& a, const SingularityExponents& beta,
                                     int count, std::uint64_t seed, double tol = 1e-9);

// Deterministic uniform double in [0,1) from a 64-bit generator state;
// keeps sampling reproducible independent of libstdc++ distribution details.
double uniform01(std::uint64_t& state);

std::string subset_to_string(const std::vector<int>& subset); // 1-based, e.g. "{1,3}"

} // namespace liouville

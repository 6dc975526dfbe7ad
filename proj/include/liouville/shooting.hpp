#pragma once

#include <cstdint>
#include <optional>

#include "liouville/linearized.hpp"

namespace liouville {

struct ShootingResult {
    InitialHeights c;      // length n, last component exactly 0
    RadialProfile profile;
    EnergyVector target;
    EnergyVector achieved;
    int iterations = 0;
    bool converged = false;
    bool boundary_warning = false; // target close to the admissible boundary
    double condition = 1.0;        // condition number of the last Jacobian
    Vec fnorm_history;             // sup-norm of the energy mismatch per iteration
};

/// Damped Newton on c -> (sigma_1(c) - target_1, ..., sigma_{n-1}(c) -
/// target_{n-1}) with c_n = 0; the last energy matches automatically through
/// the vanishing of the full Lambda functional. Throws TargetNotInPi2,
/// IntegrationFailed (with the offending heights) or MaxIterations.
ShootingResult shoot(const ProblemSpec& spec, const EnergyVector& target,
                     const std::optional<InitialHeights>& guess, double shoot_tol);

struct UniquenessReport {
    std::vector<ShootingResult> results;
    double spread = 0.0; // max pairwise sup-distance of recovered heights
    bool consistent = false;
};

/// Repeats shoot from `trials` randomized starting guesses; with the last
/// height pinned the solution is unique, so all runs must agree.
UniquenessReport uniqueness_probe(const ProblemSpec& spec, const EnergyVector& target,
                                  int trials, std::uint64_t seed, double shoot_tol = 1e-8);

/// Spec with coupling A + epsilon I; adding epsilon I preserves the (H1)
/// hypotheses whenever A satisfies them.
ProblemSpec perturbed_spec(const ProblemSpec& spec, double epsilon);

struct ContinuationRung {
    double epsilon = 0.0;
    EnergyVector projected_target; // radial projection onto the perturbed surface
    ShootingResult result;
};

struct ContinuationResult {
    std::vector<ContinuationRung> rungs;
    double cauchy_gap = 0.0; // sup-distance of c between the last two rungs
};

/// Continuation ladder for matrices with zero diagonal entries: shoots on the
/// perturbed surfaces for decreasing epsilon, warm-starting each rung from
/// the previous heights.
ContinuationResult continuation_shoot(const ProblemSpec& spec, const EnergyVector& target,
                                      const Vec& epsilon_ladder, double shoot_tol);

} // namespace liouville

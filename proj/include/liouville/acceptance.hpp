#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liouville/radial_solver.hpp"

namespace liouville {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Random instance helpers shared by the acceptance battery and the tests.
Mat random_h1_matrix(int n, std::uint64_t& state);

struct RandomInstance {
    ProblemSpec spec;
    InitialHeights c;
};

/// Random admissible instance with a_ii > 0, beta_i in (beta_lo, beta_hi),
/// c_i in [-3, 3].
RandomInstance random_instance(int n, std::uint64_t& state, double beta_lo = -1.9,
                               double beta_hi = 3.0);

/// Runs the full acceptance battery (ids empty) or a subset. Each criterion
/// is self-contained and deterministic.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {});

/// One line per criterion, "PASS"/"FAIL" first.
std::string format_acceptance_table(const std::vector<CriterionResult>& results);

} // namespace liouville

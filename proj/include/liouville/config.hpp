#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "liouville/radial_solver.hpp"

namespace liouville {

/// Parsed and validated run configuration. The problem block (A, beta,
/// tolerances, window) is checked up front, so any command can assume a valid
/// ProblemSpec.
struct RunConfig {
    std::string command; // validate | solve | energy | shoot | linearize |
                         // modes | sample | oracle | suite
    ProblemSpec spec;
    std::optional<Vec> c;
    std::optional<Vec> target;
    std::optional<Vec> alpha; // mode-0 data, or leading coefficients for k >= 1
    int k = 0;
    std::optional<double> delta;
    Vec epsilon_ladder;
    int count = 0;
    std::uint64_t seed = 0;
    double shoot_tol = 1e-8;
    std::string out_dir = ".";
};

/// Parses a JSON document into a RunConfig, filling defaults
/// (tol_step=1e-10, tol_energy=1e-9, shoot_tol=1e-8, t_min=-18, t_max=60).
/// Throws SchemaError (with the offending field path) for malformed input and
/// ValidationError wrapping the problem-validation errors.
RunConfig parse_config(const std::string& json_text);

} // namespace liouville

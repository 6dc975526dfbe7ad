#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace liouville {

/// Base error type. `code` is a stable machine-readable identifier that the
/// CLI forwards into report JSON; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// -- coupling-matrix validation ---------------------------------------------

struct NotSymmetric : Error {
    explicit NotSymmetric(const std::string& msg) : Error("not_symmetric", msg) {}
};

struct NegativeEntry : Error {
    explicit NegativeEntry(const std::string& msg) : Error("negative_entry", msg) {}
};

/// Carries the disconnected partition (1-based indices) of the positivity graph.
struct Reducible : Error {
    Reducible(std::vector<int> i1, std::vector<int> i2, const std::string& msg)
        : Error("reducible", msg), part1(std::move(i1)), part2(std::move(i2)) {}
    std::vector<int> part1, part2;
};

struct Singular : Error {
    explicit Singular(const std::string& msg) : Error("singular", msg) {}
};

struct BetaOutOfRange : Error {
    explicit BetaOutOfRange(const std::string& msg) : Error("beta_out_of_range", msg) {}
};

// -- energy-surface geometry --------------------------------------------------

struct EmptySubset : Error {
    EmptySubset() : Error("empty_subset", "subset J must be nonempty") {}
};

struct DimensionTooLarge : Error {
    explicit DimensionTooLarge(const std::string& msg) : Error("dimension_too_large", msg) {}
};

struct NoNonnegativeRoot : Error {
    explicit NoNonnegativeRoot(const std::string& msg) : Error("no_nonnegative_root", msg) {}
};

struct SamplingExhausted : Error {
    explicit SamplingExhausted(const std::string& msg) : Error("sampling_exhausted", msg) {}
};

// -- radial solver -------------------------------------------------------------

struct R0TooLarge : Error {
    explicit R0TooLarge(const std::string& msg) : Error("r0_too_large", msg) {}
};

struct StepUnderflow : Error {
    explicit StepUnderflow(const std::string& msg) : Error("step_underflow", msg) {}
};

struct TailDominates : Error {
    explicit TailDominates(const std::string& msg) : Error("tail_dominates", msg) {}
};

// -- linearized solves ----------------------------------------------------------

struct BaseNotConverged : Error {
    BaseNotConverged() : Error("base_not_converged", "base radial profile did not converge") {}
};

struct InvalidMode : Error {
    explicit InvalidMode(const std::string& msg) : Error("invalid_mode", msg) {}
};

struct BetaNotNegative : Error {
    explicit BetaNotNegative(const std::string& msg) : Error("beta_not_negative", msg) {}
};

// -- shooting --------------------------------------------------------------------

struct TargetNotInPi2 : Error {
    explicit TargetNotInPi2(const std::string& msg) : Error("target_not_in_pi2", msg) {}
};

/// Carries the initial heights at which the inner integration broke down.
struct IntegrationFailed : Error {
    IntegrationFailed(std::vector<double> c_at, const std::string& msg)
        : Error("integration_failed", msg), c(std::move(c_at)) {}
    std::vector<double> c;
};

struct MaxIterations : Error {
    explicit MaxIterations(const std::string& msg) : Error("max_iterations", msg) {}
};

// -- configuration / io ------------------------------------------------------------

struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error("schema_error", msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error("validation_error", msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io_error", msg) {}
};

} // namespace liouville

#pragma once

#include "liouville/config.hpp"

namespace liouville {

/// Executes the configured command, writing profile CSVs and a report JSON
/// under cfg.out_dir. Returns the process exit status: 0 on success, 2 when a
/// solve legitimately fails to converge, 1 on errors (which are also recorded
/// in the report with their machine-readable code).
int run(const RunConfig& cfg);

} // namespace liouville

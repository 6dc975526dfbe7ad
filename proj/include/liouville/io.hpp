#pragma once

#include <string>

#include <json.hpp>

#include "liouville/linearized.hpp"
#include "liouville/shooting.hpp"

namespace liouville {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form of v, padded to >= 15 significant digits.
std::string format_double(double v);

/// Profile CSV: header `t,r,u_1..u_n,rdu_1..rdu_n`, one row per grid point.
void write_profile_csv(const std::string& path, const RadialProfile& p);

/// Same layout for a linearized profile (phi in place of u).
void write_linearized_csv(const std::string& path, const LinearizedProfile& lp);

struct CsvProfile {
    Vec grid;
    std::vector<Vec> u;
    std::vector<Vec> du;
};

/// Re-ingests a profile CSV (as written by write_profile_csv).
CsvProfile read_profile_csv(const std::string& path);

/// Rebuilds a profile around re-ingested grid data so residuals can be
/// evaluated on it; asymptotic fields are left unpopulated.
RadialProfile assemble_profile(const ProblemSpec& spec, const Vec& c0, CsvProfile&& data);

Json profile_report(const RadialProfile& p);
Json shooting_report(const ShootingResult& r);
Json jacobian_report(const JacobianResult& j);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

} // namespace liouville

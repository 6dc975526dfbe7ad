// Acceptance battery: one line per criterion, every criterion must pass.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "liouville/acceptance.hpp"

TEST_CASE("acceptance criteria") {
    const auto results = liouville::run_acceptance();
    REQUIRE(results.size() == 11);
    std::fputs(liouville::format_acceptance_table(results).c_str(), stdout);
    std::fflush(stdout);
    for (const auto& r : results) {
        CAPTURE(r.id);
        CAPTURE(r.name);
        CAPTURE(r.detail);
        CHECK(r.pass);
    }
}

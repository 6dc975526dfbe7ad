#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "liouville/errors.hpp"
#include "liouville/io.hpp"
#include "liouville/run.hpp"

using namespace liouville;

namespace {

std::string temp_dir(const char* tag) {
    auto p = std::filesystem::temp_directory_path() /
             (std::string("liouville_test_") + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(p);
    return p.string();
}

Json load_report(const std::string& dir) {
    return Json::parse(read_text(dir + "/report.json"));
}

} // namespace

TEST_CASE("format_double round-trips and keeps 15+ significant digits") {
    std::uint64_t state = 123;
    for (int i = 0; i < 200; ++i) {
        const double v = (uniform01(state) - 0.5) * std::pow(10.0, int(uniform01(state) * 40) - 20);
        const std::string s = format_double(v);
        double back = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(res.ec == std::errc());
        CHECK(back == v);
        int digits = 0;
        for (char ch : s)
            if (ch >= '0' && ch <= '9') ++digits;
        CHECK(digits >= 15);
    }
    // Round values widen instead of printing bare shortest forms.
    const std::string four = format_double(4.0);
    double back = 0.0;
    std::from_chars(four.data(), four.data() + four.size(), back);
    CHECK(back == 4.0);
    int digits = 0;
    for (char ch : four)
        if (ch >= '0' && ch <= '9') ++digits;
    CHECK(digits >= 15);
}

TEST_CASE("parse_config fills defaults") {
    const RunConfig cfg = parse_config(
        R"({"command":"solve","A":[[1]],"beta":[0],"c":[2.0794415416798357]})");
    CHECK(cfg.command == "solve");
    CHECK(cfg.spec.tol_step == 1e-10);
    CHECK(cfg.spec.tol_energy == 1e-9);
    CHECK(cfg.shoot_tol == 1e-8);
    CHECK(cfg.spec.t_min == -18.0);
    CHECK(cfg.spec.t_max == 60.0);
    REQUIRE(cfg.c.has_value());
    CHECK((*cfg.c)[0] == doctest::Approx(std::log(8.0)));
}

TEST_CASE("parse_config error taxonomy") {
    CHECK_THROWS_AS(parse_config("{"), SchemaError);
    CHECK_THROWS_AS(parse_config(R"({"command":"fly"})"), SchemaError);
    CHECK_THROWS_AS(parse_config(R"({"command":"solve","A":[[1]],"beta":[0]})"), SchemaError);
    CHECK_THROWS_AS(parse_config(R"({"command":"solve","A":[[1]],"beta":[0],"c":[0],"zz":1})"),
                    SchemaError);
    // beta bound and reducibility surface as validation errors
    CHECK_THROWS_AS(parse_config(R"({"command":"solve","A":[[1]],"beta":[-2],"c":[0]})"),
                    ValidationError);
    CHECK_THROWS_AS(
        parse_config(R"({"command":"solve","A":[[1,0],[0,1]],"beta":[0,0],"c":[0,0]})"),
        ValidationError);
}

TEST_CASE("solve command produces the oracle report") {
    const std::string dir = temp_dir("solve");
    RunConfig cfg = parse_config(
        R"({"command":"solve","A":[[1]],"beta":[0],"c":[2.0794415416798357]})");
    cfg.out_dir = dir;
    CHECK(run(cfg) == 0);
    const Json rep = load_report(dir);
    CHECK(rep["converged"].get<bool>());
    CHECK(std::fabs(rep["sigma"][0].get<double>() - 4.0) < 1e-8);
    CHECK(std::fabs(rep["lambda_I_residual"].get<double>()) < 1e-8);
    CHECK(std::filesystem::exists(dir + "/profile.csv"));
}

TEST_CASE("profile CSV round-trips bit-exactly for residual evaluation") {
    const std::string dir = temp_dir("csv");
    RunConfig cfg = parse_config(
        R"({"command":"solve","A":[[1]],"beta":[0],"c":[2.0794415416798357]})");
    cfg.out_dir = dir;
    REQUIRE(run(cfg) == 0);

    const RadialProfile p = integrate(cfg.spec, InitialHeights{*cfg.c});
    CsvProfile data = read_profile_csv(dir + "/profile.csv");
    REQUIRE(data.grid.size() == p.grid.size());
    RadialProfile q = assemble_profile(cfg.spec, *cfg.c, std::move(data));
    CHECK(std::fabs(residual_max_defect(q) - residual_max_defect(p)) < 1e-12);
}

TEST_CASE("reports are byte-identical across runs modulo the timestamp") {
    const std::string d1 = temp_dir("det1"), d2 = temp_dir("det2");
    const std::string text =
        R"({"command":"sample","A":[[2,1],[1,2]],"beta":[0,0],"count":6,"seed":99})";
    RunConfig c1 = parse_config(text), c2 = parse_config(text);
    c1.out_dir = d1;
    c2.out_dir = d2;
    REQUIRE(run(c1) == 0);
    REQUIRE(run(c2) == 0);
    Json r1 = load_report(d1), r2 = load_report(d2);
    r1.erase("timestamp");
    r2.erase("timestamp");
    CHECK(r1.dump() == r2.dump());
}

TEST_CASE("shoot command recovers the symmetric point") {
    const std::string dir = temp_dir("shoot");
    RunConfig cfg = parse_config(
        R"({"command":"shoot","A":[[2,1],[1,2]],"beta":[0,0],
            "target":[1.3333333333333333,1.3333333333333333]})");
    cfg.out_dir = dir;
    CHECK(run(cfg) == 0);
    const Json rep = load_report(dir);
    CHECK(rep["converged"].get<bool>());
    CHECK(std::fabs(rep["c"][0].get<double>()) < 1e-6);
}

TEST_CASE("domain errors land in the report with their code") {
    const std::string dir = temp_dir("err");
    RunConfig bad = parse_config(R"({"command":"shoot","A":[[2,1],[1,2]],"beta":[0,0],
                                     "target":[9.0,9.0]})");
    bad.out_dir = dir;
    CHECK(run(bad) == 1);
    const Json rep = load_report(dir);
    CHECK(rep["error"]["code"].get<std::string>() == "target_not_in_pi2");
}

TEST_CASE("oracle command emits a closed-form profile") {
    const std::string dir = temp_dir("oracle");
    RunConfig cfg = parse_config(
        R"({"command":"oracle","beta":[0],"c":[2.0794415416798357],
            "window":{"t_min":-6,"t_max":6}})");
    cfg.out_dir = dir;
    CHECK(run(cfg) == 0);
    const Json rep = load_report(dir);
    CHECK(rep["forced_energy"].get<double>() == doctest::Approx(4.0));
    CHECK(rep["residual_defect"].get<double>() < 1e-4);
}

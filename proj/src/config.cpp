#include "liouville/config.hpp"

#include <set>

#include <json.hpp>

#include "liouville/errors.hpp"

namespace liouville {

namespace {

using nlohmann::json;

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path + " must be a number");
    return j.get<double>();
}

Vec vector_at(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path + " must be an array of numbers");
    Vec v;
    for (size_t i = 0; i < j.size(); ++i)
        v.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

Mat matrix_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw SchemaError(path + " must be an array of rows");
    const size_t n = j.size();
    Mat m(static_cast<int>(n));
    for (size_t i = 0; i < n; ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != n)
            throw SchemaError(rp + " must be a row of length " + std::to_string(n));
        for (size_t c = 0; c < n; ++c)
            m(static_cast<int>(i), static_cast<int>(c)) =
                number_at(j[i][c], rp + "[" + std::to_string(c) + "]");
    }
    return m;
}

const std::set<std::string> kCommands = {"validate", "solve",  "energy", "shoot", "linearize",
                                         "modes",    "sample", "oracle", "suite"};
const std::set<std::string> kKnownKeys = {
    "command", "A",     "beta", "c",    "target",     "k",       "alpha",  "delta",
    "epsilon_ladder",   "count", "seed", "tolerances", "window",  "out_dir"};

} // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("top level must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!kKnownKeys.count(it.key())) throw SchemaError("unknown key '" + it.key() + "'");

    RunConfig cfg;
    if (!j.contains("command") || !j["command"].is_string())
        throw SchemaError("command must be a string");
    cfg.command = j["command"].get<std::string>();
    if (!kCommands.count(cfg.command)) throw SchemaError("unknown command '" + cfg.command + "'");

    double tol_step = 1e-10, tol_energy = 1e-9;
    double t_min = -18.0, t_max = 60.0;
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) throw SchemaError("tolerances must be an object");
        if (t.contains("tol_step")) tol_step = number_at(t["tol_step"], "tolerances.tol_step");
        if (t.contains("tol_energy"))
            tol_energy = number_at(t["tol_energy"], "tolerances.tol_energy");
        if (t.contains("shoot_tol"))
            cfg.shoot_tol = number_at(t["shoot_tol"], "tolerances.shoot_tol");
    }
    if (j.contains("window")) {
        const auto& w = j["window"];
        if (!w.is_object()) throw SchemaError("window must be an object");
        if (w.contains("t_min")) t_min = number_at(w["t_min"], "window.t_min");
        if (w.contains("t_max")) t_max = number_at(w["t_max"], "window.t_max");
    }

    const bool needs_problem = cfg.command != "suite" && cfg.command != "oracle";
    if (needs_problem || j.contains("A")) {
        if (!j.contains("A")) throw SchemaError("A is required for command '" + cfg.command + "'");
        if (!j.contains("beta")) throw SchemaError("beta is required");
        try {
            cfg.spec = make_problem_spec(matrix_at(j["A"], "A"), vector_at(j["beta"], "beta"),
                                         tol_step, tol_energy, t_min, t_max);
        } catch (const SchemaError&) {
            throw;
        } catch (const Error& e) {
            throw ValidationError(std::string(e.code()) + ": " + e.what());
        }
    } else if (cfg.command == "oracle") {
        if (!j.contains("beta")) throw SchemaError("beta is required");
        const Vec b = vector_at(j["beta"], "beta");
        if (b.size() != 1) throw SchemaError("oracle command expects beta of length 1");
        try {
            Mat unit(1);
            unit(0, 0) = 1.0;
            cfg.spec = make_problem_spec(unit, b, tol_step, tol_energy, t_min, t_max);
        } catch (const Error& e) {
            throw ValidationError(std::string(e.code()) + ": " + e.what());
        }
    }

    if (j.contains("c")) cfg.c = vector_at(j["c"], "c");
    if (j.contains("target")) cfg.target = vector_at(j["target"], "target");
    if (j.contains("alpha")) cfg.alpha = vector_at(j["alpha"], "alpha");
    if (j.contains("k")) {
        if (!j["k"].is_number_integer()) throw SchemaError("k must be an integer");
        cfg.k = j["k"].get<int>();
        if (cfg.k < 0) throw SchemaError("k must be >= 0");
    }
    if (j.contains("delta")) {
        cfg.delta = number_at(j["delta"], "delta");
        if (!(*cfg.delta > 0.0)) throw SchemaError("delta must be > 0");
    }
    if (j.contains("epsilon_ladder"))
        cfg.epsilon_ladder = vector_at(j["epsilon_ladder"], "epsilon_ladder");
    if (j.contains("count")) {
        if (!j["count"].is_number_integer() || j["count"].get<int>() < 0)
            throw SchemaError("count must be a nonnegative integer");
        cfg.count = j["count"].get<int>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw SchemaError("seed must be an integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("out_dir")) {
        if (!j["out_dir"].is_string()) throw SchemaError("out_dir must be a string");
        cfg.out_dir = j["out_dir"].get<std::string>();
    }

    // Command-specific required inputs.
    auto require_c = [&] {
        if (!cfg.c) throw SchemaError("c is required for command '" + cfg.command + "'");
        if (static_cast<int>(cfg.c->size()) != cfg.spec.n())
            throw SchemaError("c must have length n");
        for (double x : *cfg.c)
            if (!std::isfinite(x)) throw SchemaError("c entries must be finite");
    };
    if (cfg.command == "solve" || cfg.command == "energy" || cfg.command == "linearize" ||
        cfg.command == "modes")
        require_c();
    if (cfg.command == "shoot") {
        if (!cfg.target) throw SchemaError("target is required for shoot");
        if (static_cast<int>(cfg.target->size()) != cfg.spec.n())
            throw SchemaError("target must have length n");
    }
    if (cfg.command == "modes" && cfg.k < 1) throw SchemaError("modes requires k >= 1");
    if (cfg.command == "oracle") {
        if (!cfg.c || cfg.c->size() != 1)
            throw SchemaError("oracle requires c = [log mu] of length 1");
    }
    if (cfg.command == "sample" && cfg.count <= 0)
        throw SchemaError("sample requires count > 0");
    return cfg;
}

} // namespace liouville

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "liouville/errors.hpp"
#include "liouville/io.hpp"
#include "liouville/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Radial solver for singular Liouville systems"};

    std::string command;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;

    app.add_option("command", command,
                   "validate | solve | energy | shoot | linearize | modes | sample | oracle | "
                   "suite")
        ->required();
    app.add_option("--config", config_path, "path to the JSON run configuration");
    app.add_option("--out-dir", out_dir, "output directory for report/CSV artifacts");
    auto* seed_opt = app.add_option("--seed", seed, "override the configuration seed");

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;

    try {
        liouville::RunConfig cfg;
        if (!config_path.empty()) {
            cfg = liouville::parse_config(liouville::read_text(config_path));
            if (cfg.command != command) {
                std::cerr << "error: config command '" << cfg.command
                          << "' does not match CLI command '" << command << "'\n";
                return 1;
            }
        } else if (command == "suite") {
            cfg = liouville::parse_config(R"({"command":"suite"})");
        } else {
            std::cerr << "error: --config is required for command '" << command << "'\n";
            return 1;
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed_set) cfg.seed = seed;
        return liouville::run(cfg);
    } catch (const liouville::Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

// riskmech: experiment runner for the risk-averse mechanism library.
//
//   riskmech <subcommand> --config <file> [--set k=v]... [--jobs N] [--out DIR]
//
// Subcommands name the experiment kind (rae, single-shot, envelope,
// welfare-extract, robust-myerson, loglog, two-stage, lb-ode, oracle,
// counterexample) or `sweep` to expand the config's sweep ranges. Exit codes:
// 0 pass, 1 error, 2 contract failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "riskmech/experiments.hpp"

namespace {

void usage() {
    std::fprintf(stderr,
                 "usage: riskmech <subcommand> --config <file> [--set k=v]... "
                 "[--jobs N] [--out DIR]\n");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        usage();
        return 1;
    }
    const std::string subcommand = argv[1];
    std::string config_path;
    std::string out_dir = "out";
    int jobs = 1;
    std::vector<std::string> overrides;

    for (int i = 2; i < argc; ++i) {
        const std::string arg = argv[i];
        auto next = [&]() -> const char* {
            if (i + 1 >= argc) {
                usage();
                std::exit(1);
            }
            return argv[++i];
        };
        if (arg == "--config") config_path = next();
        else if (arg == "--set") overrides.emplace_back(next());
        else if (arg == "--jobs") jobs = std::stoi(next());
        else if (arg == "--out") out_dir = next();
        else {
            std::fprintf(stderr, "unknown argument: %s\n", arg.c_str());
            return 1;
        }
    }
    if (config_path.empty()) {
        usage();
        return 1;
    }

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "cannot open config: %s\n", config_path.c_str());
            return 1;
        }
        riskmech::cli::json config = riskmech::cli::json::parse(in);
        for (const std::string& assignment : overrides) {
            riskmech::cli::apply_override(config, assignment);
        }
        if (subcommand != "sweep") {
            config["experiment"] = subcommand;
        }

        const riskmech::cli::RunResult result =
            subcommand == "sweep"
                ? riskmech::cli::run_sweep(config, out_dir, jobs)
                : riskmech::cli::run_experiment(config, out_dir);
        std::cout << result.summary.dump(2) << "\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

#pragma once

#include <string>

#include <json.hpp>

namespace riskmech::cli {

using json = nlohmann::json;

struct RunResult {
    json summary;
    int exit_code = 0;  // 0 pass, 1 error, 2 contract failure
};

// Executes the experiment described by `config`, writes artifacts and
// summary.json under `out_dir`, and returns the summary. Configuration or
// input errors raise exceptions (mapped to exit 1 by the CLI); contract
// failures return exit_code 2.
RunResult run_experiment(const json& config, const std::string& out_dir);

// Applies a "dotted.path=value" override; the value parses as JSON when
// possible and falls back to a string.
void apply_override(json& config, const std::string& assignment);

// Expands config["sweep"] (object: dotted path -> array of values) into its
// cartesian product and runs every point, `jobs` at a time. Artifacts land in
// out_dir/point_NNNN; a batch.csv and batch.json summarize all points in
// index order.
RunResult run_sweep(const json& config, const std::string& out_dir, int jobs);

}  // namespace riskmech::cli

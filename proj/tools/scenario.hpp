#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace biphoton::cli {

struct RunResult {
  nlohmann::ordered_json report;
  std::vector<std::filesystem::path> files;  // manifest, report included
};

/// Executes a scenario: writes the machine-readable report, histogram CSVs
/// and SVG figures into the output directory, and returns the report.
/// predict_only skips the Monte Carlo and reports analytic values only.
/// Partial outputs are removed when the run fails.
RunResult run_scenario(const ScenarioConfig& config, bool predict_only);

std::filesystem::path resolve_out_dir(const ScenarioConfig& config);

}  // namespace biphoton::cli

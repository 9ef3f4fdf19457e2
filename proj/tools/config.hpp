#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "biphoton/gaussian_state.hpp"
#include "biphoton/measurement.hpp"
#include "biphoton/optics.hpp"

namespace biphoton {
inline bool operator==(const SourceParameters& a, const SourceParameters& b) {
  return a.sigma_plus_sq == b.sigma_plus_sq &&
         a.sigma_minus_sq == b.sigma_minus_sq;
}
}  // namespace biphoton

namespace biphoton::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scenario {
  SourceCheck,
  IntermediateNull,
  IntermediateViolation,
  MigrationScan,
  PerturbationStudy,
  Custom,
};

std::string to_string(Scenario s);
Scenario scenario_from_string(std::string_view name);

/// Physical description of the down-conversion source; all lengths meters.
struct PhysicalSource {
  double pump_width;      // intensity width w of the pump beam
  double crystal_length;  // D
  double lambda_pump;
  double lambda_down;

  bool operator==(const PhysicalSource&) const = default;
};

/// Flat key = value configuration with [section] headers. Lengths accept the
/// SI suffixes m, cm, mm, um, nm; angles accept plain radians or a trailing
/// "pi" multiplier. Exactly one of [source] sigma values or physical inputs
/// must be present.
struct ScenarioConfig {
  Scenario scenario = Scenario::SourceCheck;

  std::optional<SourceParameters> source;
  std::optional<PhysicalSource> physical;

  double f_prime = 0.25 / 1.4142135623730951;  // 25/sqrt(2) cm
  double lambda_detect = 810e-9;

  double alpha_s = M_PI;  // used by the custom scenario
  double alpha_i = M_PI;
  int splits_s = 1;  // number of composed FRFT systems on the signal arm
  int splits_i = 1;

  double slit_width = 100e-6;
  double step = 50e-6;
  std::optional<int> n_steps;  // default: derived from the analytic width

  std::int64_t events = 1000000;
  std::uint64_t seed = 17;
  double epsilon = 0.01;  // perturbation-study relative z error

  std::string out_dir;          // empty: $BIPHOTON_OUT_DIR or "."
  std::string format = "json";  // json | csv report

  bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config_text(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ScenarioConfig& config);

/// sigma+^2 = 4 w^2 k/f', sigma-^2 = (k/f') 0.455 D / K with k = 2 pi /
/// lambda_down and K = 2 pi / lambda_pump.
SourceParameters resolve_source(const PhysicalSource& physical, double f_prime);

SourceParameters resolved_source(const ScenarioConfig& config);
DimensionScale scale_of(const ScenarioConfig& config);

}  // namespace biphoton::cli

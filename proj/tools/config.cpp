#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace biphoton::cli {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

struct RawConfig {
  std::map<std::string, std::string> values;  // "section.key" -> value

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string take(const std::string& key) {
    auto it = values.find(key);
    if (it == values.end())
      throw ConfigError("missing config key '" + key + "'");
    std::string v = it->second;
    values.erase(it);
    return v;
  }
};

RawConfig tokenize(std::string_view text) {
  RawConfig raw;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key or value");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!raw.values.emplace(full, value).second)
      throw ConfigError("duplicate config key '" + full + "'");
  }
  return raw;
}

double parse_number(const std::string& token, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || !std::isfinite(v))
    throw ConfigError("config key '" + key + "': bad number '" + token + "'");
  return v;
}

/// "<number> [suffix]" where suffix scales to meters or multiplies by pi.
double parse_quantity(const std::string& value, const std::string& key) {
  std::istringstream in(value);
  std::string num, unit;
  in >> num >> unit;
  std::string rest;
  if (in >> rest)
    throw ConfigError("config key '" + key + "': trailing tokens in '" +
                      value + "'");
  const double v = parse_number(num, key);
  if (unit.empty()) return v;
  if (unit == "m") return v;
  if (unit == "cm") return v * 1e-2;
  if (unit == "mm") return v * 1e-3;
  if (unit == "um" || unit == "\xc2\xb5m") return v * 1e-6;
  if (unit == "nm") return v * 1e-9;
  if (unit == "pi") return v * M_PI;
  throw ConfigError("config key '" + key + "': unknown unit '" + unit + "'");
}

std::int64_t parse_int(const std::string& value, const std::string& key) {
  const double v = parse_number(value, key);
  const auto n = static_cast<std::int64_t>(v);
  if (static_cast<double>(n) != v)
    throw ConfigError("config key '" + key + "': expected an integer");
  return n;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::SourceCheck: return "source-check";
    case Scenario::IntermediateNull: return "intermediate-null";
    case Scenario::IntermediateViolation: return "intermediate-violation";
    case Scenario::MigrationScan: return "migration-scan";
    case Scenario::PerturbationStudy: return "perturbation-study";
    case Scenario::Custom: return "custom";
  }
  throw ConfigError("unreachable scenario value");
}

Scenario scenario_from_string(std::string_view name) {
  for (Scenario s : {Scenario::SourceCheck, Scenario::IntermediateNull,
                     Scenario::IntermediateViolation, Scenario::MigrationScan,
                     Scenario::PerturbationStudy, Scenario::Custom})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

ScenarioConfig parse_config_text(std::string_view text) {
  RawConfig raw = tokenize(text);
  ScenarioConfig cfg;

  if (raw.has("run.scenario"))
    cfg.scenario = scenario_from_string(raw.take("run.scenario"));
  if (raw.has("run.out_dir")) cfg.out_dir = raw.take("run.out_dir");
  if (raw.has("run.format")) {
    cfg.format = raw.take("run.format");
    if (cfg.format != "json" && cfg.format != "csv")
      throw ConfigError("run.format must be json or csv");
  }
  if (raw.has("run.seed"))
    cfg.seed = static_cast<std::uint64_t>(parse_int(raw.take("run.seed"),
                                                    "run.seed"));
  if (raw.has("run.events")) cfg.events = parse_int(raw.take("run.events"),
                                                    "run.events");

  const bool have_sigma = raw.has("source.sigma_plus_sq") ||
                          raw.has("source.sigma_minus_sq");
  const bool have_physical = raw.has("source.pump_width") ||
                             raw.has("source.crystal_length") ||
                             raw.has("source.lambda_pump") ||
                             raw.has("source.lambda_down");
  if (have_sigma && have_physical)
    throw ConfigError(
        "give either sigma_plus_sq/sigma_minus_sq or the physical source "
        "inputs, not both");
  if (!have_sigma && !have_physical)
    throw ConfigError("a [source] section is required");
  if (have_sigma) {
    const double sp2 = parse_quantity(raw.take("source.sigma_plus_sq"),
                                      "source.sigma_plus_sq");
    const double sm2 = parse_quantity(raw.take("source.sigma_minus_sq"),
                                      "source.sigma_minus_sq");
    try {
      cfg.source.emplace(sp2, sm2);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else {
    PhysicalSource phys{};
    phys.pump_width = parse_quantity(raw.take("source.pump_width"),
                                     "source.pump_width");
    phys.crystal_length = parse_quantity(raw.take("source.crystal_length"),
                                         "source.crystal_length");
    phys.lambda_pump = parse_quantity(raw.take("source.lambda_pump"),
                                      "source.lambda_pump");
    phys.lambda_down = parse_quantity(raw.take("source.lambda_down"),
                                      "source.lambda_down");
    cfg.physical = phys;
  }

  if (raw.has("scale.f_prime"))
    cfg.f_prime = parse_quantity(raw.take("scale.f_prime"), "scale.f_prime");
  if (raw.has("scale.lambda_detect"))
    cfg.lambda_detect = parse_quantity(raw.take("scale.lambda_detect"),
                                       "scale.lambda_detect");

  if (raw.has("optics.alpha_s"))
    cfg.alpha_s = parse_quantity(raw.take("optics.alpha_s"), "optics.alpha_s");
  if (raw.has("optics.alpha_i"))
    cfg.alpha_i = parse_quantity(raw.take("optics.alpha_i"), "optics.alpha_i");
  if (raw.has("optics.splits_s"))
    cfg.splits_s = static_cast<int>(parse_int(raw.take("optics.splits_s"),
                                              "optics.splits_s"));
  if (raw.has("optics.splits_i"))
    cfg.splits_i = static_cast<int>(parse_int(raw.take("optics.splits_i"),
                                              "optics.splits_i"));

  if (raw.has("detector.slit_width"))
    cfg.slit_width = parse_quantity(raw.take("detector.slit_width"),
                                    "detector.slit_width");
  if (raw.has("detector.step"))
    cfg.step = parse_quantity(raw.take("detector.step"), "detector.step");
  if (raw.has("detector.n_steps"))
    cfg.n_steps = static_cast<int>(parse_int(raw.take("detector.n_steps"),
                                             "detector.n_steps"));

  if (raw.has("perturbation.epsilon"))
    cfg.epsilon = parse_quantity(raw.take("perturbation.epsilon"),
                                 "perturbation.epsilon");

  if (!raw.values.empty())
    throw ConfigError("unknown config key '" + raw.values.begin()->first +
                      "'");

  if (cfg.f_prime <= 0.0 || cfg.lambda_detect <= 0.0)
    throw ConfigError("scale lengths must be positive");
  if (cfg.slit_width <= 0.0 || cfg.step <= 0.0)
    throw ConfigError("detector lengths must be positive");
  if (cfg.n_steps && *cfg.n_steps < 8)
    throw ConfigError("detector.n_steps must be at least 8");
  if (cfg.events < 1000) throw ConfigError("run.events must be at least 1000");
  if (cfg.splits_s < 1 || cfg.splits_i < 1)
    throw ConfigError("optics splits must be at least 1");
  if (cfg.epsilon < 0.0) throw ConfigError("perturbation.epsilon must be >= 0");
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "[run]\n";
  out << "scenario = " << to_string(cfg.scenario) << "\n";
  if (!cfg.out_dir.empty()) out << "out_dir = " << cfg.out_dir << "\n";
  out << "format = " << cfg.format << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "events = " << cfg.events << "\n";
  out << "\n[source]\n";
  if (cfg.source) {
    out << "sigma_plus_sq = " << format_number(cfg.source->sigma_plus_sq)
        << "\n";
    out << "sigma_minus_sq = " << format_number(cfg.source->sigma_minus_sq)
        << "\n";
  } else if (cfg.physical) {
    out << "pump_width = " << format_number(cfg.physical->pump_width) << "\n";
    out << "crystal_length = " << format_number(cfg.physical->crystal_length)
        << "\n";
    out << "lambda_pump = " << format_number(cfg.physical->lambda_pump)
        << "\n";
    out << "lambda_down = " << format_number(cfg.physical->lambda_down)
        << "\n";
  }
  out << "\n[scale]\n";
  out << "f_prime = " << format_number(cfg.f_prime) << "\n";
  out << "lambda_detect = " << format_number(cfg.lambda_detect) << "\n";
  out << "\n[optics]\n";
  out << "alpha_s = " << format_number(cfg.alpha_s) << "\n";
  out << "alpha_i = " << format_number(cfg.alpha_i) << "\n";
  out << "splits_s = " << cfg.splits_s << "\n";
  out << "splits_i = " << cfg.splits_i << "\n";
  out << "\n[detector]\n";
  out << "slit_width = " << format_number(cfg.slit_width) << "\n";
  out << "step = " << format_number(cfg.step) << "\n";
  if (cfg.n_steps) out << "n_steps = " << *cfg.n_steps << "\n";
  out << "\n[perturbation]\n";
  out << "epsilon = " << format_number(cfg.epsilon) << "\n";
  return out.str();
}

SourceParameters resolve_source(const PhysicalSource& physical,
                                double f_prime) {
  if (!(physical.pump_width > 0.0) || !(physical.crystal_length > 0.0) ||
      !(physical.lambda_pump > 0.0) || !(physical.lambda_down > 0.0) ||
      !(f_prime > 0.0))
    throw ConfigError("resolve_source: physical inputs must be positive");
  const double k = 2.0 * M_PI / physical.lambda_down;
  const double pump_k = 2.0 * M_PI / physical.lambda_pump;
  const double k_over_f = k / f_prime;
  const double sp2 = 4.0 * physical.pump_width * physical.pump_width * k_over_f;
  const double sm2 = k_over_f * 0.455 * physical.crystal_length / pump_k;
  return SourceParameters(sp2, sm2);
}

SourceParameters resolved_source(const ScenarioConfig& config) {
  if (config.source) return *config.source;
  if (config.physical) return resolve_source(*config.physical, config.f_prime);
  throw ConfigError("config carries no source description");
}

DimensionScale scale_of(const ScenarioConfig& config) {
  return {2.0 * M_PI / config.lambda_detect, config.f_prime};
}

}  // namespace biphoton::cli

#include "scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string_view>

#include "biphoton/criteria.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/measurement.hpp"
#include "biphoton/schmidt.hpp"
#include "svg_plot.hpp"

namespace biphoton::cli {

namespace {

using nlohmann::ordered_json;

// Focal length used for imaging-type systems whose natural f' degenerates.
constexpr double kImagingFocal = 0.25;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Output sink that deletes everything it created if the run aborts.
class OutputTracker {
 public:
  explicit OutputTracker(const std::filesystem::path& dir) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string());
  }

  std::filesystem::path reserve(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
  }

  void write_text(const std::string& name, const std::string& body) {
    const std::filesystem::path p = reserve(name);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << body;
    if (!out) throw IoError("failed writing " + p.string());
  }

  void discard_all() {
    std::error_code ec;
    for (const auto& p : files_) std::filesystem::remove(p, ec);
    files_.clear();
  }

  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

struct Measurement {
  std::string name;
  double config_alpha_s, config_alpha_i;  // orders of the probed variables
  double det_alpha_s, det_alpha_i;        // orders realized at the detectors
  ScanDirection direction;
  double analytic_variance;   // probed +/- coordinate, no slits
  double expected_broadened;  // plus the two-slit top-hat term
  CoincidenceHistogram hist;  // filled unless predicting
  bool simulated = false;
};

double slit_broadening(const ScenarioConfig& cfg, const DimensionScale& scale) {
  const double w = to_dimensionless(cfg.slit_width, scale);
  return 2.0 * w * w / 12.0;
}

int default_steps(const ScenarioConfig& cfg, const DimensionScale& scale,
                  double broadened_var) {
  const double axis_sigma = std::sqrt(std::max(broadened_var, 1e-12));
  const double axis_per_step = 2.0 * to_dimensionless(cfg.step, scale);
  const double reach = 4.2 * axis_sigma + to_dimensionless(cfg.slit_width, scale);
  int half = static_cast<int>(std::ceil(reach / axis_per_step));
  half = std::clamp(half, 4, 4000);
  return 2 * half + 1;
}

Measurement make_measurement(const ScenarioConfig& cfg,
                             const CovarianceMatrix4& source,
                             const DimensionScale& scale, std::string name,
                             double alpha_s, double alpha_i, bool q_type,
                             ScanDirection direction, std::uint64_t salt,
                             bool predict_only) {
  Measurement m;
  m.name = std::move(name);
  m.config_alpha_s = alpha_s;
  m.config_alpha_i = alpha_i;
  m.direction = direction;
  // A momentum-type variable is read out as a position after a further
  // inverse Fourier transform on each arm.
  m.det_alpha_s = q_type ? alpha_s - M_PI / 2.0 : alpha_s;
  m.det_alpha_i = q_type ? alpha_i - M_PI / 2.0 : alpha_i;

  const CovarianceMatrix4 at_planes = apply_arm_transforms(
      source, rotation_matrix(m.det_alpha_s), rotation_matrix(m.det_alpha_i));
  const DgczReport plain = dgcz_sum_source(
      at_planes, DgczPairing::MinusPlus);  // holds both +/- variances
  m.analytic_variance = direction == ScanDirection::Opposite
                            ? plain.var_minus
                            : dgcz_sum_source(at_planes, DgczPairing::PlusMinus)
                                  .var_minus;
  m.expected_broadened = m.analytic_variance + slit_broadening(cfg, scale);

  if (!predict_only) {
    DetectorConfig det{cfg.slit_width, cfg.step,
                       cfg.n_steps ? *cfg.n_steps
                                   : default_steps(cfg, scale,
                                                   m.expected_broadened),
                       scale};
    ScanConfig scan{direction, cfg.events, mix_seed(cfg.seed, salt)};
    const auto samples = sample_pairs(at_planes, cfg.events, scan.seed);
    m.hist = scan_coincidences(samples, det, scan);
    m.hist.fit = fit_gaussian(m.hist);
    m.simulated = true;
  }
  return m;
}

ordered_json measurement_json(const Measurement& m, const ScenarioConfig& cfg,
                              const DimensionScale& scale,
                              const std::string& csv_name,
                              const std::string& svg_name) {
  ordered_json j;
  j["name"] = m.name;
  j["alpha_s"] = m.config_alpha_s;
  j["alpha_i"] = m.config_alpha_i;
  j["detection_alpha_s"] = m.det_alpha_s;
  j["detection_alpha_i"] = m.det_alpha_i;
  j["scan_direction"] =
      m.direction == ScanDirection::Same ? "same" : "opposite";
  j["analytic_variance"] = m.analytic_variance;
  j["expected_broadened_variance"] = m.expected_broadened;
  if (m.simulated && m.hist.fit) {
    j["fitted_variance"] = m.hist.fit->variance;
    j["variance_std_error"] = m.hist.fit->variance_std_error;
    DetectorConfig det{cfg.slit_width, cfg.step, 8, scale};
    j["deconvolved_variance"] = deconvolved_variance(*m.hist.fit, det);
    j["accepted_events"] = m.hist.accepted_events;
    j["coverage_warning"] = m.hist.coverage_warning;
    j["csv"] = csv_name;
    j["svg"] = svg_name;
  }
  return j;
}

ordered_json dgcz_json(const DgczReport& r) {
  ordered_json j;
  for (const auto& [key, value] : to_key_values(r)) {
    if (key == "violated")
      j[key] = r.violated;
    else if (key == "pairing")
      j[key] = value;
    else
      j[key] = std::stod(value);
  }
  return j;
}

/// Lens realization of total order alpha as `splits` composed systems of
/// equal sub-order, all sharing f'. Imaging/identity sub-orders take the
/// conventional focal length since their natural f' degenerates.
LensSystem realize_order(double alpha, int splits, const DimensionScale& scale) {
  if (splits < 1) throw ConfigError("optics splits must be at least 1");
  const double sub = alpha / splits;
  if (sub < 0.0 || sub > M_PI)
    throw ConfigError(
        "per-system FRFT order must lie in [0, pi]; raise optics splits");
  std::vector<LensSystem> parts;
  const double s = std::sin(sub);
  for (int j = 0; j < splits; ++j) {
    if (s > 1e-12)
      parts.push_back(frft_lens_system(sub, scale.f_prime / s, scale.k));
    else
      parts.push_back(
          frft_lens_system(sub, kImagingFocal, scale.k, scale.f_prime));
  }
  return compose_systems(parts);
}

ordered_json optics_json(const std::string& arm, double alpha, int splits,
                         const DimensionScale& scale) {
  const LensSystem sys = realize_order(alpha, splits, scale);
  const ArmTransform t = arm_transform(sys);
  ordered_json j;
  j["arm"] = arm;
  j["order"] = alpha;
  j["systems"] = splits;
  const auto classified = classify_rotation(t, 1e-6);
  if (classified) j["classified_order"] = *classified;
  j["elements"] = to_text(sys);
  return j;
}

struct PairStudy {
  double ideal = 0.0;
  double worst = 0.0;
  std::string pattern_s, pattern_i;
};

std::string pattern_string(const std::vector<int>& signs) {
  std::string s;
  for (int v : signs) s += v > 0 ? '+' : '-';
  return s;
}

/// Joint worst case over both arms' free-space sign patterns; the objective
/// is the variance of the probed coordinate of the transformed state.
PairStudy worst_case_pair(const CovarianceMatrix4& source,
                          const LensSystem& sys_s, const LensSystem& sys_i,
                          double epsilon, CorrelationSign which) {
  const auto objective = [&](const ArmTransform& ts, const ArmTransform& ti) {
    const CovarianceMatrix4 cov = apply_arm_transforms(source, ts, ti);
    const DgczPairing pairing = which == CorrelationSign::Minus
                                    ? DgczPairing::MinusPlus
                                    : DgczPairing::PlusMinus;
    return dgcz_sum_source(cov, pairing).var_minus;  // the rho-type entry
  };

  PairStudy out;
  out.ideal = objective(arm_transform(sys_s), arm_transform(sys_i));

  const std::size_t gaps_s = free_space_count(sys_s);
  const std::size_t gaps_i = free_space_count(sys_i);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> signs_s(gaps_s), signs_i(gaps_i);
  for (std::uint64_t bs = 0; bs < (std::uint64_t{1} << gaps_s); ++bs) {
    for (std::size_t k = 0; k < gaps_s; ++k)
      signs_s[k] = (bs >> (gaps_s - 1 - k)) & 1u ? 1 : -1;
    const LensSystem ps =
        perturb_positions(sys_s, epsilon, SignedPattern{signs_s});
    const ArmTransform ts = arm_transform(ps);
    for (std::uint64_t bi = 0; bi < (std::uint64_t{1} << gaps_i); ++bi) {
      for (std::size_t k = 0; k < gaps_i; ++k)
        signs_i[k] = (bi >> (gaps_i - 1 - k)) & 1u ? 1 : -1;
      const LensSystem pi =
          perturb_positions(sys_i, epsilon, SignedPattern{signs_i});
      const double value = objective(ts, arm_transform(pi));
      if (value > best) {
        best = value;
        out.pattern_s = pattern_string(signs_s);
        out.pattern_i = pattern_string(signs_i);
      }
    }
  }
  out.worst = best;
  return out;
}

std::string csv_escape_free(const std::string& s) { return s; }

}  // namespace

std::filesystem::path resolve_out_dir(const ScenarioConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  if (const char* env = std::getenv("BIPHOTON_OUT_DIR"); env && *env)
    return env;
  return ".";
}

namespace {

void write_measurements(OutputTracker& out, std::vector<Measurement>& ms,
                        ordered_json& report, const ScenarioConfig& cfg,
                        const DimensionScale& scale) {
  ordered_json list = ordered_json::array();
  std::vector<CoincidenceHistogram> panels;
  std::vector<std::string> titles;
  for (const Measurement& m : ms) {
    const std::string csv_name = m.name + ".csv";
    const std::string svg_name = m.name + ".svg";
    if (m.simulated) {
      out.write_text(csv_name, histogram_csv(m.hist));
      PlotStyle style;
      style.title = m.name;
      style.x_label = m.direction == ScanDirection::Same
                          ? "rho_i + rho_s (dimensionless)"
                          : "rho_i - rho_s (dimensionless)";
      emit_plot(m.hist, style, out.reserve(svg_name));
      panels.push_back(m.hist);
      titles.push_back(m.name);
    }
    list.push_back(measurement_json(m, cfg, scale, csv_name, svg_name));
  }
  if (!panels.empty())
    emit_panel_plot(panels, titles, out.reserve("figure.svg"));
  report["measurements"] = std::move(list);
}

void finalize(OutputTracker& out, ordered_json& report,
              const ScenarioConfig& cfg, RunResult& result) {
  ordered_json manifest = ordered_json::array();
  for (const auto& p : out.files()) manifest.push_back(p.filename().string());
  const std::string report_name =
      cfg.format == "csv" ? "report.csv" : "report.json";
  manifest.push_back(report_name);
  report["files"] = manifest;

  if (cfg.format == "csv") {
    // Flat section,key,value rows for spreadsheet use.
    std::ostringstream csv;
    csv << "section,key,value\n";
    const std::function<void(const std::string&, const ordered_json&)> walk =
        [&](const std::string& prefix, const ordered_json& node) {
          if (node.is_object()) {
            for (const auto& [k, v] : node.items())
              walk(prefix.empty() ? k : prefix + "." + k, v);
          } else if (node.is_array()) {
            int idx = 0;
            for (const auto& v : node) walk(prefix + "[" +
                                            std::to_string(idx++) + "]", v);
          } else {
            const auto dot = prefix.rfind('.');
            const std::string section =
                dot == std::string::npos ? "" : prefix.substr(0, dot);
            const std::string key =
                dot == std::string::npos ? prefix : prefix.substr(dot + 1);
            csv << csv_escape_free(section) << "," << csv_escape_free(key)
                << "," << node.dump() << "\n";
          }
        };
    walk("", report);
    out.write_text(report_name, csv.str());
  } else {
    out.write_text(report_name, report.dump(2) + "\n");
  }
  result.report = report;
  result.files = out.files();
}

ordered_json resolved_json(const ScenarioConfig& cfg,
                           const SourceParameters& params,
                           const DimensionScale& scale) {
  const StateSummary summary(params);
  ordered_json j;
  j["sigma_plus_sq"] = params.sigma_plus_sq;
  j["sigma_minus_sq"] = params.sigma_minus_sq;
  if (cfg.physical) {
    j["pump_width"] = cfg.physical->pump_width;
    j["crystal_length"] = cfg.physical->crystal_length;
    j["lambda_pump"] = cfg.physical->lambda_pump;
    j["lambda_down"] = cfg.physical->lambda_down;
  }
  j["f_prime"] = scale.f_prime;
  j["k"] = scale.k;
  j["s1"] = summary.s1;
  j["s2"] = summary.s2;
  j["alpha_sep"] = separability_angle(params);
  j["slit_width_dimensionless"] = to_dimensionless(cfg.slit_width, scale);
  return j;
}

ordered_json analytic_json(const SourceParameters& params, double alpha_s,
                           double alpha_i) {
  const CovarianceMatrix4 source = make_source_state(params);
  const StateSummary summary(params);
  ordered_json j;
  j["source_sum_minus_plus"] =
      dgcz_sum_source(source, DgczPairing::MinusPlus).sum;
  j["source_sum_plus_minus"] =
      dgcz_sum_source(source, DgczPairing::PlusMinus).sum;
  j["alpha_s"] = alpha_s;
  j["alpha_i"] = alpha_i;
  j["rotated_sum"] = rotated_dgcz_closed_form(source, alpha_s, alpha_i);
  if (summary.s1 != summary.s2) {
    j["violation_threshold"] =
        (summary.s1 + summary.s2 - 4.0) / (summary.s1 - summary.s2);
    j["violation_possible"] =
        violation_possible(summary, alpha_s + alpha_i);
  }
  j["matching_alpha_i"] = matching_idler_angle(alpha_s);
  return j;
}

RunResult run_measured_scenario(const ScenarioConfig& cfg, bool predict_only,
                                double alpha_s, double alpha_i, int splits_s,
                                int splits_i, bool include_rho_plus,
                                bool source_panels) {
  const SourceParameters params = resolved_source(cfg);
  const DimensionScale scale = scale_of(cfg);
  const CovarianceMatrix4 source = make_source_state(params);

  OutputTracker out(resolve_out_dir(cfg));
  RunResult result;
  try {
    ordered_json report;
    report["scenario"] = to_string(cfg.scenario);
    report["seed"] = cfg.seed;
    report["events"] = cfg.events;
    report["resolved"] = resolved_json(cfg, params, scale);
    report["analytic"] = analytic_json(params, alpha_s, alpha_i);

    ordered_json optics = ordered_json::array();
    optics.push_back(optics_json("signal", alpha_s, splits_s, scale));
    optics.push_back(optics_json("idler", alpha_i, splits_i, scale));
    report["optics"] = std::move(optics);

    std::vector<Measurement> ms;
    ms.push_back(make_measurement(cfg, source, scale, "rho_minus", alpha_s,
                                  alpha_i, false, ScanDirection::Opposite, 1,
                                  predict_only));
    if (include_rho_plus)
      ms.push_back(make_measurement(cfg, source, scale, "rho_plus", alpha_s,
                                    alpha_i, false, ScanDirection::Same, 2,
                                    predict_only));
    ms.push_back(make_measurement(cfg, source, scale, "q_plus", alpha_s,
                                  alpha_i, true, ScanDirection::Same, 3,
                                  predict_only));
    if (source_panels)
      ms.push_back(make_measurement(cfg, source, scale, "q_minus", alpha_s,
                                    alpha_i, true, ScanDirection::Opposite, 4,
                                    predict_only));

    write_measurements(out, ms, report, cfg, scale);

    if (!predict_only) {
      const Measurement& minus = ms.front();
      const Measurement* plus = nullptr;
      for (const Measurement& m : ms)
        if (m.name == "q_plus") plus = &m;
      if (!plus) throw std::logic_error("q_plus measurement missing");
      const DgczReport est =
          estimate_dgcz(minus.hist, plus->hist, alpha_s, alpha_i);
      ordered_json d = dgcz_json(est);
      d["analytic_sum"] = report["analytic"]["rotated_sum"];
      report["dgcz"] = std::move(d);
    }

    finalize(out, report, cfg, result);
  } catch (...) {
    out.discard_all();
    throw;
  }
  return result;
}

RunResult run_migration_scan(const ScenarioConfig& cfg) {
  const SourceParameters params = resolved_source(cfg);
  const DimensionScale scale = scale_of(cfg);
  const CovarianceMatrix4 source = make_source_state(params);
  const double alpha_sep = separability_angle(params);

  OutputTracker out(resolve_out_dir(cfg));
  RunResult result;
  try {
    const int n = 158;
    std::vector<double> alphas(n), ks(n), covs(n);
    for (int i = 0; i < n; ++i) {
      alphas[i] = (M_PI / 2.0) * i / (n - 1);
      ks[i] = real_part_schmidt_number(params, alphas[i]);
      const CovarianceMatrix4 rotated = apply_arm_transforms(
          source, rotation_matrix(alphas[i]), rotation_matrix(alphas[i]));
      covs[i] = rotated.cov(kRhoS, kRhoI);
    }
    const auto argmin = std::min_element(ks.begin(), ks.end()) - ks.begin();

    std::ostringstream csv;
    csv << "alpha,schmidt_number_real_part,cov_rho_s_rho_i\n";
    char buf[96];
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", alphas[i], ks[i],
                    covs[i]);
      csv << buf;
    }
    out.write_text("migration.csv", csv.str());

    PlotStyle style;
    style.title = "real-part Schmidt number vs FRFT order";
    style.x_label = "alpha (rad)";
    style.y_label = "K";
    emit_curve_plot(alphas, ks, style, out.reserve("migration.svg"));

    const CovarianceMatrix4 at_sep = apply_arm_transforms(
        source, rotation_matrix(alpha_sep), rotation_matrix(alpha_sep));

    ordered_json report;
    report["scenario"] = to_string(cfg.scenario);
    report["resolved"] = resolved_json(cfg, params, scale);
    ordered_json mj;
    mj["alpha_sep"] = alpha_sep;
    mj["grid_step"] = alphas[1] - alphas[0];
    mj["argmin_alpha"] = alphas[argmin];
    mj["k_min"] = ks[argmin];
    mj["k_at_zero"] = ks.front();
    mj["cov_rho_s_rho_i_at_alpha_sep"] = at_sep.cov(kRhoS, kRhoI);
    report["migration"] = std::move(mj);

    finalize(out, report, cfg, result);
  } catch (...) {
    out.discard_all();
    throw;
  }
  return result;
}

RunResult run_perturbation_study(const ScenarioConfig& cfg) {
  const SourceParameters params = resolved_source(cfg);
  const DimensionScale scale = scale_of(cfg);
  const CovarianceMatrix4 source = make_source_state(params);

  OutputTracker out(resolve_out_dir(cfg));
  RunResult result;
  try {
    const double f34 = scale.f_prime / std::sin(3.0 * M_PI / 4.0);
    const double f512 = scale.f_prime / std::sin(5.0 * M_PI / 12.0);
    const double f14 = scale.f_prime / std::sin(M_PI / 4.0);

    const LensSystem sys512 = frft_lens_system(5.0 * M_PI / 12.0, f512, scale.k);
    const LensSystem signal_54 =
        compose_systems(std::array{sys512, sys512, sys512});
    const LensSystem idler_34 = frft_lens_system(3.0 * M_PI / 4.0, f34, scale.k);
    const LensSystem signal_34 = idler_34;
    const LensSystem idler_14 = frft_lens_system(M_PI / 4.0, f14, scale.k);
    const LensSystem imaging =
        frft_lens_system(M_PI, kImagingFocal, scale.k, scale.f_prime);
    const LensSystem fourier =
        frft_lens_system(M_PI / 2.0, scale.f_prime, scale.k);

    struct Entry {
      const char* name;
      const LensSystem* s;
      const LensSystem* i;
      CorrelationSign which;
    };
    const Entry entries[] = {
        // Intermediate pair at (5pi/4, 3pi/4); q read out a quarter turn back.
        {"var_rho_minus_prime", &signal_54, &idler_34, CorrelationSign::Minus},
        {"var_q_plus_prime", &signal_34, &idler_14, CorrelationSign::Plus},
        // Source pair via imaging and Fourier configurations.
        {"var_rho_minus_source", &imaging, &imaging, CorrelationSign::Minus},
        {"var_q_plus_source", &fourier, &fourier, CorrelationSign::Plus},
    };

    ordered_json report;
    report["scenario"] = to_string(cfg.scenario);
    report["resolved"] = resolved_json(cfg, params, scale);
    report["epsilon"] = cfg.epsilon;

    std::ostringstream csv;
    csv << "quantity,ideal_variance,worst_variance,pattern_signal,"
           "pattern_idler\n";
    ordered_json studies = ordered_json::array();
    double sum_prime = 0.0;
    for (const Entry& e : entries) {
      const PairStudy st =
          worst_case_pair(source, *e.s, *e.i, cfg.epsilon, e.which);
      ordered_json sj;
      sj["quantity"] = e.name;
      sj["ideal_variance"] = st.ideal;
      sj["worst_variance"] = st.worst;
      sj["pattern_signal"] = st.pattern_s;
      sj["pattern_idler"] = st.pattern_i;
      studies.push_back(std::move(sj));
      csv << e.name << "," << st.ideal << "," << st.worst << ","
          << st.pattern_s << "," << st.pattern_i << "\n";
      if (std::string_view(e.name).ends_with("_prime")) sum_prime += st.worst;
    }
    report["studies"] = std::move(studies);
    report["perturbed_intermediate_sum"] = sum_prime;
    report["perturbed_intermediate_violated"] = sum_prime < 2.0;
    out.write_text("perturbation.csv", csv.str());

    finalize(out, report, cfg, result);
  } catch (...) {
    out.discard_all();
    throw;
  }
  return result;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, bool predict_only) {
  switch (cfg.scenario) {
    case Scenario::SourceCheck:
      return run_measured_scenario(cfg, predict_only, M_PI, M_PI, 1, 1,
                                   /*include_rho_plus=*/true,
                                   /*source_panels=*/true);
    case Scenario::IntermediateNull:
      return run_measured_scenario(cfg, predict_only, 3.0 * M_PI / 4.0,
                                   3.0 * M_PI / 4.0, 1, 1,
                                   /*include_rho_plus=*/true,
                                   /*source_panels=*/false);
    case Scenario::IntermediateViolation: {
      const int splits = cfg.splits_s > 1 ? cfg.splits_s : 3;
      return run_measured_scenario(cfg, predict_only, 5.0 * M_PI / 4.0,
                                   3.0 * M_PI / 4.0, splits, 1,
                                   /*include_rho_plus=*/false,
                                   /*source_panels=*/false);
    }
    case Scenario::MigrationScan:
      return run_migration_scan(cfg);
    case Scenario::PerturbationStudy:
      return run_perturbation_study(cfg);
    case Scenario::Custom:
      return run_measured_scenario(cfg, predict_only, cfg.alpha_s, cfg.alpha_i,
                                   cfg.splits_s, cfg.splits_i,
                                   /*include_rho_plus=*/false,
                                   /*source_panels=*/false);
  }
  throw ConfigError("unreachable scenario value");
}

}  // namespace biphoton::cli

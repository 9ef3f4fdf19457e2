#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "biphoton/errors.hpp"
#include "biphoton/optics.hpp"
#include "config.hpp"
#include "scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> events;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
};

biphoton::cli::ScenarioConfig load_with_overrides(const CommonOptions& opt) {
  biphoton::cli::ScenarioConfig cfg =
      biphoton::cli::load_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.events) cfg.events = *opt.events;
  if (opt.out_dir) cfg.out_dir = *opt.out_dir;
  if (opt.format) {
    if (*opt.format != "json" && *opt.format != "csv")
      throw biphoton::cli::ConfigError("--format must be json or csv");
    cfg.format = *opt.format;
  }
  if (cfg.events < 1000)
    throw biphoton::cli::ConfigError("--events must be at least 1000");
  return cfg;
}

int execute(const CommonOptions& opt, bool predict_only) {
  const biphoton::cli::ScenarioConfig cfg = load_with_overrides(opt);
  const biphoton::cli::RunResult result =
      biphoton::cli::run_scenario(cfg, predict_only);
  for (const auto& file : result.files)
    std::cout << "wrote " << file.string() << "\n";
  if (result.report.contains("dgcz")) {
    const auto& d = result.report["dgcz"];
    std::cout << "dgcz sum = " << d["sum"] << " (analytic "
              << d["analytic_sum"] << "), violated = " << d["violated"]
              << "\n";
  }
  return kExitOk;
}

int design_frft(double alpha, double f, double k,
                std::optional<double> f_prime) {
  const biphoton::LensSystem sys =
      biphoton::frft_lens_system(alpha, f, k, f_prime);
  double z = 0.0;
  std::printf("# order %.12g FRFT, f = %.12g m, f' = %.12g m\n", alpha, f,
              sys.scale.f_prime);
  for (const biphoton::OpticalElement& e : sys.elements) {
    if (e.kind == biphoton::ElementKind::FreeSpace) {
      std::printf("free space  %.12g m  (to z = %.12g m)\n", e.length_or_focal,
                  z + e.length_or_focal);
      z += e.length_or_focal;
    } else {
      std::printf("thin lens   f = %.12g m  (at z = %.12g m)\n",
                  e.length_or_focal, z);
    }
  }
  const auto order =
      biphoton::classify_rotation(biphoton::arm_transform(sys), 1e-9);
  if (order)
    std::printf("# realizes phase-space rotation alpha = %.12g rad\n", *order);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "biphoton: two-photon transverse entanglement through FRFT optics"};
  app.require_subcommand(1);

  CommonOptions opt;
  const char* env_out = std::getenv("BIPHOTON_OUT_DIR");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", opt.config_path, "scenario config file")
        ->required();
    sub->add_option("--seed", opt.seed, "override run.seed");
    sub->add_option("--events", opt.events, "override run.events");
    sub->add_option("--out-dir", opt.out_dir,
                    env_out ? "output directory (default $BIPHOTON_OUT_DIR)"
                            : "output directory");
    sub->add_option("--format", opt.format, "report format: json|csv");
  };

  CLI::App* run = app.add_subcommand("run", "simulate a scenario end to end");
  add_common(run);
  CLI::App* predict =
      app.add_subcommand("predict", "analytic predictions only, no sampling");
  add_common(predict);

  double alpha = 0.0, focal = 0.0, wavenumber = 1.0;
  std::optional<double> f_prime;
  CLI::App* design =
      app.add_subcommand("design-frft", "print lens placements for an order");
  design->add_option("--alpha", alpha, "FRFT order in radians, [0, pi]")
      ->required();
  design->add_option("--f", focal, "lens focal length in meters")->required();
  design->add_option("--k", wavenumber, "field wavenumber in 1/m");
  design->add_option("--f-prime", f_prime,
                     "explicit scale length for alpha in {0, pi}");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return execute(opt, false);
    if (predict->parsed()) return execute(opt, true);
    return design_frft(alpha, focal, wavenumber, f_prime);
  } catch (const biphoton::cli::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const biphoton::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const biphoton::AdditivityViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

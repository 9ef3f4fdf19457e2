#include "biphoton/optics.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

Eigen::Matrix2d free_space_matrix(double z, double f_prime) {
  Eigen::Matrix2d m;
  m << 1.0, z / f_prime, 0.0, 1.0;
  return m;
}

Eigen::Matrix2d thin_lens_matrix(double f, double f_prime) {
  Eigen::Matrix2d m;
  m << 1.0, 0.0, -f_prime / f, 1.0;
  return m;
}

}  // namespace

ArmTransform rotation_matrix(double alpha) {
  require(std::isfinite(alpha), "rotation_matrix: alpha must be finite");
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  ArmTransform t;
  t.m << c, s, -s, c;
  return t;
}

LensSystem frft_lens_system(double alpha, double f, double k,
                            std::optional<double> f_prime_override) {
  if (!(alpha >= 0.0 && alpha <= M_PI))
    throw std::out_of_range(
        "frft_lens_system: order must lie in [0, pi]; compose systems for "
        "larger orders");
  require(f > 0.0 && std::isfinite(f), "frft_lens_system: focal length > 0");
  require(k > 0.0 && std::isfinite(k), "frft_lens_system: wavenumber > 0");

  const double natural_f_prime = f * std::sin(alpha);
  double f_prime = natural_f_prime;
  if (f_prime_override) {
    require(*f_prime_override > 0.0, "frft_lens_system: f' must be positive");
    f_prime = *f_prime_override;
  } else if (!(std::sin(alpha) > 1e-12)) {
    throw std::invalid_argument(
        "frft_lens_system: f sin(alpha) degenerates at alpha in {0, pi}; "
        "supply an explicit f'");
  }

  const double half = std::sin(alpha / 2.0);
  const double z = 2.0 * f * half * half;
  LensSystem sys;
  sys.elements = {{ElementKind::FreeSpace, z},
                  {ElementKind::ThinLens, f},
                  {ElementKind::FreeSpace, z}};
  sys.scale = {k, f_prime};
  return sys;
}

LensSystem compose_systems(std::span<const LensSystem> systems) {
  require(!systems.empty(), "compose_systems: no systems given");
  const DimensionScale scale = systems.front().scale;
  LensSystem out;
  out.scale = scale;
  for (const LensSystem& sys : systems) {
    if (std::abs(sys.scale.f_prime - scale.f_prime) >
        1e-9 * std::abs(scale.f_prime))
      throw AdditivityViolation(
          "compose_systems: systems must share the scale length f'");
    require(std::abs(sys.scale.k - scale.k) <= 1e-9 * std::abs(scale.k),
            "compose_systems: systems must share the wavenumber k");
    out.elements.insert(out.elements.end(), sys.elements.begin(),
                        sys.elements.end());
  }
  return out;
}

ArmTransform arm_transform(const LensSystem& system) {
  require(!system.elements.empty(), "arm_transform: empty system");
  require(system.scale.f_prime > 0.0 && system.scale.k > 0.0,
          "arm_transform: invalid scale");
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  for (const OpticalElement& e : system.elements) {
    require(std::isfinite(e.length_or_focal), "arm_transform: length finite");
    if (e.kind == ElementKind::FreeSpace) {
      require(e.length_or_focal >= 0.0, "arm_transform: negative free space");
      m = free_space_matrix(e.length_or_focal, system.scale.f_prime) * m;
    } else {
      require(e.length_or_focal != 0.0, "arm_transform: lens focal nonzero");
      m = thin_lens_matrix(e.length_or_focal, system.scale.f_prime) * m;
    }
  }
  return {m};
}

std::optional<double> classify_rotation(const ArmTransform& t, double tol) {
  const double alpha = std::atan2(t.m(0, 1), t.m(0, 0));
  const Eigen::Matrix2d r = rotation_matrix(alpha).m;
  if ((t.m - r).cwiseAbs().maxCoeff() <= tol) return alpha;
  return std::nullopt;
}

std::size_t free_space_count(const LensSystem& system) {
  std::size_t n = 0;
  for (const OpticalElement& e : system.elements)
    if (e.kind == ElementKind::FreeSpace) ++n;
  return n;
}

namespace {

LensSystem apply_signs(const LensSystem& system, double epsilon,
                       const std::vector<int>& signs) {
  LensSystem out = system;
  std::size_t i = 0;
  for (OpticalElement& e : out.elements) {
    if (e.kind != ElementKind::FreeSpace) continue;
    e.length_or_focal *= 1.0 + epsilon * signs.at(i);
    ++i;
  }
  return out;
}

}  // namespace

LensSystem perturb_positions(const LensSystem& system, double epsilon,
                             const PerturbationMode& mode) {
  require(epsilon >= 0.0 && std::isfinite(epsilon),
          "perturb_positions: epsilon must be non-negative");
  const std::size_t gaps = free_space_count(system);

  if (const auto* fixed = std::get_if<SignedPattern>(&mode)) {
    require(fixed->signs.size() == gaps,
            "perturb_positions: one sign per free-space element");
    for (int s : fixed->signs)
      require(s == 1 || s == -1, "perturb_positions: signs are +/-1");
    return apply_signs(system, epsilon, fixed->signs);
  }

  if (const auto* random = std::get_if<RandomSigns>(&mode)) {
    std::mt19937_64 rng(random->seed);
    std::vector<int> signs(gaps);
    for (std::size_t i = 0; i < gaps; ++i)
      signs[i] = (rng() & 1u) ? 1 : -1;
    return apply_signs(system, epsilon, signs);
  }

  const auto& worst = std::get<WorstCase>(mode);
  require(static_cast<bool>(worst.objective),
          "perturb_positions: worst-case mode needs an objective");
  std::vector<int> best_signs(gaps, -1);
  double best = -std::numeric_limits<double>::infinity();
  // Patterns enumerate in lexicographic order (-1 before +1), so the first
  // pattern reaching the maximum wins ties.
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << gaps); ++bits) {
    std::vector<int> signs(gaps);
    for (std::size_t i = 0; i < gaps; ++i)
      signs[i] = (bits >> (gaps - 1 - i)) & 1u ? 1 : -1;
    const double value = worst.objective(apply_signs(system, epsilon, signs));
    if (value > best) {
      best = value;
      best_signs = signs;
    }
  }
  return apply_signs(system, epsilon, best_signs);
}

double to_dimensionless(double x_meters, const DimensionScale& scale) {
  require(scale.k > 0.0 && scale.f_prime > 0.0, "invalid dimension scale");
  return std::sqrt(scale.k / scale.f_prime) * x_meters;
}

double from_dimensionless(double rho, const DimensionScale& scale) {
  require(scale.k > 0.0 && scale.f_prime > 0.0, "invalid dimension scale");
  return rho / std::sqrt(scale.k / scale.f_prime);
}

std::string to_text(const LensSystem& system) {
  std::ostringstream out;
  out.precision(17);
  out << "k " << system.scale.k << "\n";
  out << "f_prime " << system.scale.f_prime << "\n";
  for (const OpticalElement& e : system.elements)
    out << (e.kind == ElementKind::FreeSpace ? "free " : "lens ")
        << e.length_or_focal << "\n";
  return out.str();
}

LensSystem lens_system_from_text(std::string_view text) {
  LensSystem sys;
  sys.scale = {0.0, 0.0};
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    double value;
    if (!(in >> value))
      throw std::invalid_argument("lens system text: missing value after '" +
                                  word + "'");
    if (word == "k")
      sys.scale.k = value;
    else if (word == "f_prime")
      sys.scale.f_prime = value;
    else if (word == "free")
      sys.elements.push_back({ElementKind::FreeSpace, value});
    else if (word == "lens")
      sys.elements.push_back({ElementKind::ThinLens, value});
    else
      throw std::invalid_argument("lens system text: unknown token '" + word +
                                  "'");
  }
  require(sys.scale.k > 0.0, "lens system text: k must be given and positive");
  require(sys.scale.f_prime > 0.0,
          "lens system text: f_prime must be given and positive");
  require(!sys.elements.empty(), "lens system text: no elements");
  return sys;
}

}  // namespace biphoton

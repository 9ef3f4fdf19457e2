#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace biphoton {

/// 2x2 real symplectic (unit determinant) map acting on one arm's
/// dimensionless column (rho, q).
struct ArmTransform {
  Eigen::Matrix2d m;
};

/// Phase-space rotation by alpha: rho' = cos(a) rho + sin(a) q,
/// q' = -sin(a) rho + cos(a) q.
ArmTransform rotation_matrix(double alpha);

/// Physical-to-dimensionless scaling, rho = sqrt(k / f') rho_bar.
struct DimensionScale {
  double k = 1.0;    // detected-field wavenumber, 1/m
  double f_prime;    // scale length f' = f sin(alpha), m
};

enum class ElementKind { FreeSpace, ThinLens };

struct OpticalElement {
  ElementKind kind;
  double length_or_focal;  // meters; propagation distance or focal length
};

/// Ordered element list traversed by the light, with the dimensionless scale
/// the transform is expressed in.
struct LensSystem {
  std::vector<OpticalElement> elements;
  DimensionScale scale;
};

/// Symmetric free-lens-free system realizing an order-alpha FRFT:
/// z_alpha = 2 f sin^2(alpha/2) on both sides of a lens of focal length f,
/// scale length f' = f sin(alpha). Valid for alpha in [0, pi]; orders beyond
/// pi are built by composing systems. At alpha = 0 or pi the natural f'
/// degenerates to zero and an explicit f' must be supplied.
LensSystem frft_lens_system(double alpha, double f, double k = 1.0,
                            std::optional<double> f_prime_override = {});

/// Concatenates systems sharing the same f' (relative 1e-9) and k.
/// Throws AdditivityViolation when the scale lengths disagree.
LensSystem compose_systems(std::span<const LensSystem> systems);

/// Ray-transfer product over the elements in dimensionless coordinates:
/// free space z -> [[1, z/f'], [0, 1]], thin lens f -> [[1, 0], [-f'/f, 1]].
ArmTransform arm_transform(const LensSystem& system);

/// Rotation order alpha in (-pi, pi] with |t - R(alpha)|_max <= tol,
/// or nullopt when t is not a rotation to that tolerance.
std::optional<double> classify_rotation(const ArmTransform& t, double tol);

/// Perturbation modes for free-space placement errors. Signs multiply the
/// relative error per free-space element, in element order.
struct SignedPattern {
  std::vector<int> signs;  // one of {-1, +1} per free-space element
};
struct RandomSigns {
  std::uint64_t seed;
};
/// Exhaustive search over all sign patterns, returning the system whose
/// objective is largest; ties break toward the lexicographically smallest
/// pattern (-1 ordered before +1).
struct WorstCase {
  std::function<double(const LensSystem&)> objective;
};
using PerturbationMode = std::variant<SignedPattern, RandomSigns, WorstCase>;

/// Scales every free-space length z by (1 + sign * epsilon).
LensSystem perturb_positions(const LensSystem& system, double epsilon,
                             const PerturbationMode& mode);

std::size_t free_space_count(const LensSystem& system);

double to_dimensionless(double x_meters, const DimensionScale& scale);
double from_dimensionless(double rho, const DimensionScale& scale);

/// Plain text form: header lines "k <1/m>" and "f_prime <m>", then one
/// element per line, "free <m>" or "lens <m>".
std::string to_text(const LensSystem& system);
LensSystem lens_system_from_text(std::string_view text);

}  // namespace biphoton

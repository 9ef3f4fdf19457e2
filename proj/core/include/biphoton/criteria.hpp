#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/gaussian_state.hpp"
#include "biphoton/optics.hpp"

namespace biphoton {

/// The two DGCZ inequalities: a separable state obeys
///   Var(rho_-) + Var(q_+) >= 2   (MinusPlus)
///   Var(rho_+) + Var(q_-) >= 2   (PlusMinus)
/// with rho_pm = rho_i +/- rho_s, q_pm = q_i +/- q_s. Violating either
/// certifies entanglement; the boundary itself does not.
enum class DgczPairing { MinusPlus, PlusMinus };

struct DgczReport {
  double var_minus;    // Var(rho'_-), or Var(rho'_+) under PlusMinus
  double var_plus_q;   // Var(q'_+),   or Var(q'_-)   under PlusMinus
  double sum;          // var_minus + var_plus_q
  bool violated;       // sum < 2, strict
  DgczPairing pairing;
  double alpha_s = 0.0;
  double alpha_i = 0.0;
  std::optional<double> sum_std_error;  // present for measured estimates
};

/// Flat key-value form used by machine-readable reports.
std::vector<std::pair<std::string, std::string>> to_key_values(
    const DgczReport& report);

/// DGCZ sum of a state as-is (angles reported as zero).
DgczReport dgcz_sum_source(const CovarianceMatrix4& cov, DgczPairing pairing);

/// Congruence by blockdiag(t_s, t_i); also maps the means.
CovarianceMatrix4 apply_arm_transforms(const CovarianceMatrix4& cov,
                                       const ArmTransform& t_s,
                                       const ArmTransform& t_i);

/// Rotated MinusPlus sum in closed form, valid for any Gaussian state
/// including nonzero rho-q correlations:
///   (1+cos S)/2 [Var(rho_-) + Var(q_+)] + (1-cos S)/2 [Var(rho_+) + Var(q_-)]
///   - sin(S) Cov(rho_+, q_+) + sin(S) Cov(rho_-, q_-),   S = alpha_s + alpha_i,
/// where Cov is the symmetrized covariance. Agrees with transforming the
/// covariance matrix and evaluating the source sum.
double rotated_dgcz_closed_form(const CovarianceMatrix4& cov, double alpha_s,
                                double alpha_i);

/// S1 = sigma+^2 + 1/sigma-^2 and S2 = sigma-^2 + 1/sigma+^2, the two DGCZ
/// sums of the source state. S1 S2 >= 4 always.
struct StateSummary {
  double s1;
  double s2;

  explicit StateSummary(const SourceParameters& params);
  StateSummary(double s1, double s2) : s1(s1), s2(s2) {}
};

/// Necessary condition for a rotated-variable violation of an entangled
/// source state (S2 <= 2): cos(alpha_s + alpha_i) > (S1 + S2 - 4)/(S1 - S2).
/// In particular cos = 0 can never produce one. Throws std::invalid_argument
/// for S1 == S2, where the threshold is undefined.
bool violation_possible(const StateSummary& summary, double angle_sum);

/// Smallest non-negative alpha_i with alpha_s + alpha_i = 0 (mod 2 pi),
/// the order that recovers the source sum exactly.
double matching_idler_angle(double alpha_s);

/// arctan(sigma+ sigma-) in (0, pi/2): with both arms at this order the
/// inter-arm position covariance vanishes and the real part of the
/// wavefunction turns separable.
double separability_angle(const SourceParameters& params);

}  // namespace biphoton

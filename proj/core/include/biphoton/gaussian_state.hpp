#pragma once

#include <Eigen/Dense>
#include <complex>

namespace biphoton {

/// Widths of the two-photon Gaussian in the sum/difference coordinates
/// rho_pm = rho_i +/- rho_s (no 1/sqrt(2) normalization). The state is
/// entangled iff sigma_plus != sigma_minus.
struct SourceParameters {
  double sigma_plus_sq;
  double sigma_minus_sq;

  SourceParameters(double sigma_plus_sq, double sigma_minus_sq);

  double sigma_plus() const;
  double sigma_minus() const;
};

/// Quadrature ordering used throughout: (rho_s, q_s, rho_i, q_i).
enum Quadrature : int { kRhoS = 0, kQS = 1, kRhoI = 2, kQI = 3 };

/// Symmetrized second moments of the four quadratures, plus first moments.
/// Entries are central covariances Cov(x_a, x_b) = <{x_a,x_b}>/2 - <x_a><x_b>
/// with [rho_j, q_k] = i delta_jk, so Var(rho_j) Var(q_j) >= 1/4 per arm.
class CovarianceMatrix4 {
 public:
  CovarianceMatrix4(const Eigen::Matrix4d& entries,
                    const Eigen::Vector4d& mean = Eigen::Vector4d::Zero());

  const Eigen::Matrix4d& matrix() const { return m_; }
  const Eigen::Vector4d& mean() const { return mean_; }

  double var(Quadrature a) const { return m_(a, a); }
  double cov(Quadrature a, Quadrature b) const { return m_(a, b); }

 private:
  Eigen::Matrix4d m_;
  Eigen::Vector4d mean_;
};

/// Second moments of the source state: Var(rho_pm) = sigma_pm^2,
/// Var(q_pm) = 1/sigma_pm^2, all rho-q cross covariances zero.
CovarianceMatrix4 make_source_state(const SourceParameters& params);

/// Two-photon position amplitude at the source plane,
///   (pi sigma- sigma+)^(-1/2) exp(-(rho_i+rho_s)^2 / 4 sigma+^2)
///                             exp(-(rho_i-rho_s)^2 / 4 sigma-^2).
/// Real and positive everywhere.
double position_amplitude(const SourceParameters& params, double rho_s,
                          double rho_i);

/// Wavevector-representation amplitude; the exact 2-D Fourier transform
/// (unitary convention, kernel e^{-i q rho} / 2 pi) of position_amplitude.
double momentum_amplitude(const SourceParameters& params, double q_s,
                          double q_i);

/// Position amplitude after both arms propagate through FRFT systems of the
/// same order alpha. Phase convention is the additive one of frft.hpp.
std::complex<double> propagated_position_amplitude(
    const SourceParameters& params, double alpha, double rho_s, double rho_i);

}  // namespace biphoton

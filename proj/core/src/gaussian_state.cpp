#include "biphoton/gaussian_state.hpp"

#include <cmath>
#include <stdexcept>

#include "biphoton/frft.hpp"

namespace biphoton {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

SourceParameters::SourceParameters(double sp2, double sm2)
    : sigma_plus_sq(sp2), sigma_minus_sq(sm2) {
  require(std::isfinite(sp2) && sp2 > 0.0,
          "sigma_plus_sq must be positive and finite");
  require(std::isfinite(sm2) && sm2 > 0.0,
          "sigma_minus_sq must be positive and finite");
}

double SourceParameters::sigma_plus() const { return std::sqrt(sigma_plus_sq); }
double SourceParameters::sigma_minus() const {
  return std::sqrt(sigma_minus_sq);
}

CovarianceMatrix4::CovarianceMatrix4(const Eigen::Matrix4d& entries,
                                     const Eigen::Vector4d& mean)
    : m_(entries), mean_(mean) {
  require(m_.allFinite() && mean_.allFinite(),
          "covariance entries must be finite");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  require((m_ - m_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "covariance matrix must be symmetric");
  m_ = 0.5 * (m_ + m_.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(m_,
                                                     Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() >= -1e-9 * scale,
          "covariance matrix must be positive semidefinite");

  for (int arm = 0; arm < 2; ++arm) {
    const double vr = m_(2 * arm, 2 * arm);
    const double vq = m_(2 * arm + 1, 2 * arm + 1);
    require(vr * vq >= 0.25 * (1.0 - 1e-9),
            "arm variances violate Var(rho) Var(q) >= 1/4");
  }
}

CovarianceMatrix4 make_source_state(const SourceParameters& params) {
  const double sp2 = params.sigma_plus_sq;
  const double sm2 = params.sigma_minus_sq;
  const double var_rho = 0.25 * (sp2 + sm2);
  const double cov_rho = 0.25 * (sp2 - sm2);
  const double var_q = 0.25 * (1.0 / sp2 + 1.0 / sm2);
  const double cov_q = 0.25 * (1.0 / sp2 - 1.0 / sm2);

  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(kRhoS, kRhoS) = m(kRhoI, kRhoI) = var_rho;
  m(kRhoS, kRhoI) = m(kRhoI, kRhoS) = cov_rho;
  m(kQS, kQS) = m(kQI, kQI) = var_q;
  m(kQS, kQI) = m(kQI, kQS) = cov_q;
  return CovarianceMatrix4(m);
}

double position_amplitude(const SourceParameters& params, double rho_s,
                          double rho_i) {
  const double sp = params.sigma_plus();
  const double sm = params.sigma_minus();
  const double plus = rho_i + rho_s;
  const double minus = rho_i - rho_s;
  return std::pow(M_PI * sm * sp, -0.5) *
         std::exp(-plus * plus / (4.0 * params.sigma_plus_sq) -
                  minus * minus / (4.0 * params.sigma_minus_sq));
}

double momentum_amplitude(const SourceParameters& params, double q_s,
                          double q_i) {
  const double sp = params.sigma_plus();
  const double sm = params.sigma_minus();
  const double plus = q_i + q_s;
  const double minus = q_i - q_s;
  return std::sqrt(sp * sm / M_PI) *
         std::exp(-params.sigma_plus_sq * plus * plus / 4.0 -
                  params.sigma_minus_sq * minus * minus / 4.0);
}

std::complex<double> propagated_position_amplitude(
    const SourceParameters& params, double alpha, double rho_s, double rho_i) {
  const ComplexGaussian1D gp =
      frft_gaussian_1d(gaussian_mode(params.sigma_plus_sq), alpha);
  const ComplexGaussian1D gm =
      frft_gaussian_1d(gaussian_mode(params.sigma_minus_sq), alpha);
  // Jacobian of (rho_s, rho_i) -> (rho_+, rho_-) contributes the sqrt(2).
  return std::sqrt(2.0) * eval(gp, rho_i + rho_s) * eval(gm, rho_i - rho_s);
}

}  // namespace biphoton

#include "biphoton/schmidt.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "biphoton/frft.hpp"

namespace biphoton {

namespace {

struct DetrendedModes {
  std::complex<double> a_plus;
  std::complex<double> a_minus;
  double prefactor;  // |sqrt(2) n+ n-|
};

DetrendedModes detrended_modes(const SourceParameters& params, double alpha) {
  const ComplexGaussian1D gp =
      frft_gaussian_1d(gaussian_mode(params.sigma_plus_sq), alpha);
  const ComplexGaussian1D gm =
      frft_gaussian_1d(gaussian_mode(params.sigma_minus_sq), alpha);
  // Split the chirp evenly so the (rho_s^2 + rho_i^2) phase cancels while
  // the cross-term phase Im(a+ - a-) is kept.
  const double chirp = 0.5 * (gp.a.imag() + gm.a.imag());
  const std::complex<double> i(0.0, 1.0);
  return {gp.a - i * chirp, gm.a - i * chirp,
          std::sqrt(2.0) * std::abs(gp.norm * gm.norm)};
}

}  // namespace

std::complex<double> detrended_position_amplitude(const SourceParameters& params,
                                                  double alpha, double rho_s,
                                                  double rho_i) {
  const DetrendedModes dm = detrended_modes(params, alpha);
  const double plus = rho_i + rho_s;
  const double minus = rho_i - rho_s;
  return dm.prefactor *
         std::exp(-dm.a_plus * (plus * plus) - dm.a_minus * (minus * minus));
}

double real_part_schmidt_number(const SourceParameters& params, double alpha,
                                const GridSpec& grid) {
  if (grid.points < 8)
    throw std::invalid_argument(
        "real_part_schmidt_number: grid needs at least 8 points per axis");
  if (!(grid.n_std > 0.0))
    throw std::invalid_argument(
        "real_part_schmidt_number: grid extent must be positive");

  const DetrendedModes dm = detrended_modes(params, alpha);
  const double var_plus = 1.0 / (4.0 * dm.a_plus.real());
  const double var_minus = 1.0 / (4.0 * dm.a_minus.real());
  // Per-axis standard deviation, Var(rho_s) = (Var(rho_+) + Var(rho_-)) / 4.
  const double sigma_axis = std::sqrt(0.25 * (var_plus + var_minus));

  const int n = grid.points;
  const double half = grid.n_std * sigma_axis;
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j)
    x(j) = -half + 2.0 * half * static_cast<double>(j) / (n - 1);

  Eigen::MatrixXd re(n, n);
  for (int r = 0; r < n; ++r) {
    for (int col = 0; col < n; ++col) {
      const double plus = x(r) + x(col);
      const double minus = x(r) - x(col);
      const std::complex<double> z =
          -dm.a_plus * (plus * plus) - dm.a_minus * (minus * minus);
      re(r, col) = dm.prefactor * std::exp(z.real()) * std::cos(z.imag());
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(re);
  const Eigen::VectorXd& s = svd.singularValues();
  const double sum2 = s.squaredNorm();
  const double sum4 = s.cwiseAbs2().squaredNorm();
  return sum2 * sum2 / sum4;
}

}  // namespace biphoton

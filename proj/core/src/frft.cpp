#include "biphoton/frft.hpp"

#include <cmath>
#include <stdexcept>

namespace biphoton {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_2pi(double alpha) {
  double b = std::fmod(alpha, kTwoPi);
  if (b < 0.0) b += kTwoPi;
  return b;
}

}  // namespace

ComplexGaussian1D gaussian_mode(double sigma_sq) {
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq))
    throw std::invalid_argument("gaussian_mode: sigma_sq must be positive");
  return {std::complex<double>(1.0 / (4.0 * sigma_sq), 0.0),
          std::complex<double>(std::pow(kTwoPi * sigma_sq, -0.25), 0.0), 0.0};
}

double mode_intensity_variance(const ComplexGaussian1D& g) {
  return 1.0 / (4.0 * g.a.real());
}

double mode_l2_norm_sq(const ComplexGaussian1D& g) {
  return std::norm(g.norm) * std::sqrt(M_PI / (2.0 * g.a.real()));
}

std::complex<double> eval(const ComplexGaussian1D& g, double x) {
  return g.norm * std::exp(-g.a * (x * x));
}

ComplexGaussian1D frft_gaussian_1d(const ComplexGaussian1D& g, double alpha) {
  if (!(g.a.real() > 0.0))
    throw std::invalid_argument("frft_gaussian_1d: Re(a) must be positive");
  if (!std::isfinite(alpha))
    throw std::invalid_argument("frft_gaussian_1d: order must be finite");

  const double beta = wrap_2pi(alpha);
  const double total = g.alpha_applied + alpha;
  if (beta == 0.0 || beta == M_PI) {
    // Identity / parity; even in x either way.
    return {g.a, g.norm, total};
  }

  const double c = std::cos(beta);
  const double s = std::sin(beta);
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> m = c + 4.0 * i * g.a * s;
  const std::complex<double> a2 = (4.0 * g.a * c + i * s) / (4.0 * m);

  // The branch of sqrt(m) follows the winding of m over one period: m starts
  // at 1, crosses -1 at beta = pi, and Im(m) = 4 Re(a) sin(beta) keeps its
  // arg in (0, pi) before the crossing and (pi, 2 pi) after, so lifting the
  // principal arg to [0, 2 pi) reproduces the continuous branch.
  double theta = std::arg(m);
  if (theta < 0.0) theta += kTwoPi;
  const std::complex<double> sqrt_m =
      std::sqrt(std::abs(m)) * std::exp(i * (0.5 * theta));
  const std::complex<double> norm2 =
      g.norm * std::exp(i * (0.5 * beta)) / sqrt_m;

  return {a2, norm2, total};
}

}  // namespace biphoton

#pragma once

#include <complex>

namespace biphoton {

/// One-dimensional complex Gaussian amplitude, norm * exp(-a x^2) with
/// Re(a) > 0, together with the accumulated FRFT order that produced it.
///
/// The coordinate is one of the paper-convention sum/difference modes
/// rho_pm = rho_i +/- rho_s, whose commutator is [rho_pm, q_pm] = 2i; the
/// minimum-uncertainty mode is a = 1/4 and stays fixed under every order.
struct ComplexGaussian1D {
  std::complex<double> a;
  std::complex<double> norm;
  double alpha_applied = 0.0;
};

/// Unit-L2-norm real Gaussian mode with intensity variance sigma_sq,
/// i.e. (2 pi sigma_sq)^(-1/4) exp(-x^2 / 4 sigma_sq).
ComplexGaussian1D gaussian_mode(double sigma_sq);

/// Variance of |amplitude|^2, equal to 1 / (4 Re a).
double mode_intensity_variance(const ComplexGaussian1D& g);

/// Integral of |amplitude|^2 over the axis.
double mode_l2_norm_sq(const ComplexGaussian1D& g);

std::complex<double> eval(const ComplexGaussian1D& g, double x);

/// Closed-form fractional Fourier transform of a complex Gaussian.
///
/// The kernel is unitary and normalized so that orders add exactly,
/// frft(frft(g, a1), a2) == frft(g, a1 + a2), with period 2 pi (the
/// oscillator-evolution normalization: the prefactor carries an e^{i alpha/2}
/// relative to the kernel of Ozaktas et al., which removes the zero-point
/// phase and the metaplectic sign). Orders 0 and pi are the identity and
/// parity; a Gaussian is even, so both leave it unchanged.
ComplexGaussian1D frft_gaussian_1d(const ComplexGaussian1D& g, double alpha);

}  // namespace biphoton

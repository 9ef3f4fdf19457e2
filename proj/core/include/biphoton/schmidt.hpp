#pragma once

#include <complex>

#include "biphoton/gaussian_state.hpp"

namespace biphoton {

/// Discretization used for the real-part Schmidt analysis.
struct GridSpec {
  int points = 256;    // samples per axis; fewer than 8 is rejected
  double n_std = 6.0;  // half-extent in per-axis standard deviations
};

/// Equal-arm propagated amplitude in the detection frame: the arm-symmetric
/// quadratic chirp (the residual phase a lens-free propagation would carry;
/// removable to a spherical reference surface) and the global phase are
/// stripped. Intensities and correlations are unchanged.
std::complex<double> detrended_position_amplitude(const SourceParameters& params,
                                                  double alpha, double rho_s,
                                                  double rho_i);

/// Effective Schmidt mode count K = (sum s^2)^2 / sum s^4 of the singular
/// values of Re Psi_alpha sampled on an n x n grid, with Psi_alpha in the
/// detection frame above. K == 1 for a product state; for an entangled
/// source K is minimized at alpha = arctan(sigma+ sigma-), where the
/// position covariance between the arms vanishes and intensity correlation
/// measurements go blind.
double real_part_schmidt_number(const SourceParameters& params, double alpha,
                                const GridSpec& grid = {});

}  // namespace biphoton

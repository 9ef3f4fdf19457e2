#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biphoton/criteria.hpp"
#include "biphoton/gaussian_state.hpp"
#include "biphoton/optics.hpp"

namespace biphoton {

/// Slit detectors scanned on translation stages, all lengths in meters.
struct DetectorConfig {
  double slit_width;  // top-hat aperture full width
  double step;        // stage step between scan positions
  int n_steps;        // number of scan positions, >= 8
  DimensionScale scale;
};

/// Scanning both detectors in the same direction probes the "+" correlations
/// (sum coordinate); opposite directions probe the "-" correlations.
enum class ScanDirection { Same, Opposite };

struct ScanConfig {
  ScanDirection direction;
  std::int64_t pairs;  // simulated photon pairs, >= 1000
  std::uint64_t seed;
};

enum class CorrelationSign { Plus, Minus };

/// Result of the least-squares fit A exp(-(x-c)^2 / 2v) to a histogram.
/// The fit is Poisson-weighted (w_i = 1/max(c_i, 1)); the variance error is
/// the corresponding (J^T W J)^-1 diagonal. Initialization is from the
/// histogram moments; v is kept positive by clamping during iteration.
struct GaussianFit {
  double center;
  double variance;  // dimensionless, > 0
  double amplitude;
  double rms_residual;
  double variance_std_error;
};

/// Coincidence counts versus the dimensionless scan coordinate
/// (rho_i +/- rho_s probed at each slit-pair position).
struct CoincidenceHistogram {
  std::vector<double> bin_centers;
  std::vector<std::uint64_t> counts;
  CorrelationSign which;
  DimensionScale scale;
  std::uint64_t accepted_events = 0;  // equals the sum of counts
  bool coverage_warning = false;      // scan spans < 4 distribution widths
  std::optional<GaussianFit> fit;
};

/// Transverse position pairs (rho_s, rho_i) drawn from the position marginal
/// of a propagated state. Deterministic for a given seed: the stream is
/// produced in fixed 64k-pair chunks, each from its own splitmix-derived
/// substream, so chunks may be evaluated concurrently without changing the
/// result. Throws DegenerateDensity if the position block is not positive
/// definite.
std::vector<std::array<double, 2>> sample_pairs(const CovarianceMatrix4& cov,
                                                std::int64_t n,
                                                std::uint64_t seed);

/// Scans both slits in equal steps and bins coincidences. At step m the
/// slits sit at m*step (Same) or -/+ m*step (Opposite), centered on the
/// scan range; a pair is counted when both photons fall inside their
/// apertures. The recorded coordinate is the probed sum/difference value,
/// two slit positions apart per step.
CoincidenceHistogram scan_coincidences(std::span<const std::array<double, 2>> samples,
                                       const DetectorConfig& det,
                                       const ScanConfig& scan);

/// Fits the Gaussian model to a histogram. Requires >= 8 bins in the scan
/// window; throws FitFailure when the iteration does not converge or the
/// fitted peak is wider than the scanned range. No slit deconvolution is
/// applied: the variance describes the raw coincidence curve, top-hat
/// broadening included, as the measured curves are reported.
GaussianFit fit_gaussian(const CoincidenceHistogram& hist);

/// Deconvolved variance: fitted variance minus the two-slit top-hat
/// contribution 2 w^2/12 (w the dimensionless slit width). Secondary
/// quantity; may come out negative for slit-dominated peaks.
double deconvolved_variance(const GaussianFit& fit, const DetectorConfig& det);

/// DGCZ estimate from a conjugate pair of measured histograms: sum of the
/// fitted variances with the propagated standard error; the violation flag
/// uses the central value. Throws std::invalid_argument when the histograms
/// disagree on the dimensionless scale or correlation signs.
DgczReport estimate_dgcz(const CoincidenceHistogram& hist_minus_rho,
                         const CoincidenceHistogram& hist_plus_q,
                         double alpha_s = 0.0, double alpha_i = 0.0);

/// CSV rows "bin_center,counts" with a header line.
std::string histogram_csv(const CoincidenceHistogram& hist);

}  // namespace biphoton

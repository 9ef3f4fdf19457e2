#include "biphoton/measurement.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

constexpr std::int64_t kChunkPairs = 65536;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void validate_detector(const DetectorConfig& det) {
  require(det.slit_width > 0.0 && std::isfinite(det.slit_width),
          "detector: slit width must be positive");
  require(det.step > 0.0 && std::isfinite(det.step),
          "detector: step must be positive");
  require(det.n_steps >= 8, "detector: need at least 8 steps");
  require(det.scale.k > 0.0 && det.scale.f_prime > 0.0,
          "detector: invalid dimension scale");
}

bool scales_match(const DimensionScale& a, const DimensionScale& b) {
  return std::abs(a.k - b.k) <= 1e-12 * std::abs(a.k) &&
         std::abs(a.f_prime - b.f_prime) <= 1e-12 * std::abs(a.f_prime);
}

}  // namespace

std::vector<std::array<double, 2>> sample_pairs(const CovarianceMatrix4& cov,
                                                std::int64_t n,
                                                std::uint64_t seed) {
  require(n >= 0, "sample_pairs: n must be non-negative");
  Eigen::Matrix2d pos;
  pos << cov.cov(kRhoS, kRhoS), cov.cov(kRhoS, kRhoI),
      cov.cov(kRhoI, kRhoS), cov.cov(kRhoI, kRhoI);
  Eigen::LLT<Eigen::Matrix2d> llt(pos);
  if (llt.info() != Eigen::Success)
    throw DegenerateDensity(
        "sample_pairs: position block is not positive definite");
  const Eigen::Matrix2d l = llt.matrixL();
  const double mean_s = cov.mean()(kRhoS);
  const double mean_i = cov.mean()(kRhoI);

  std::vector<std::array<double, 2>> out(static_cast<std::size_t>(n));
  // Fixed-size chunks, each drawn from its own substream; the merged stream
  // is independent of how chunks are scheduled.
  const std::int64_t chunks = (n + kChunkPairs - 1) / kChunkPairs;
  for (std::int64_t chunk = 0; chunk < chunks; ++chunk) {
    std::mt19937_64 rng(splitmix64(seed ^ (0x51a7e5eedull + 2654435761ull *
                                           static_cast<std::uint64_t>(chunk))));
    std::normal_distribution<double> normal;
    const std::int64_t begin = chunk * kChunkPairs;
    const std::int64_t end = std::min(n, begin + kChunkPairs);
    for (std::int64_t j = begin; j < end; ++j) {
      const double z0 = normal(rng);
      const double z1 = normal(rng);
      out[static_cast<std::size_t>(j)] = {
          mean_s + l(0, 0) * z0,
          mean_i + l(1, 0) * z0 + l(1, 1) * z1};
    }
  }
  return out;
}

CoincidenceHistogram scan_coincidences(std::span<const std::array<double, 2>> samples,
                                       const DetectorConfig& det,
                                       const ScanConfig& scan) {
  validate_detector(det);
  require(scan.pairs >= 1000, "scan: pair budget below 1000");

  const bool same = scan.direction == ScanDirection::Same;
  const double half_w = 0.5 * det.slit_width;
  const int n = det.n_steps;
  const double offset = 0.5 * (n - 1);

  CoincidenceHistogram hist;
  hist.which = same ? CorrelationSign::Plus : CorrelationSign::Minus;
  hist.scale = det.scale;
  hist.bin_centers.resize(n);
  hist.counts.assign(n, 0);

  std::vector<double> slit_pos(n);
  for (int m = 0; m < n; ++m) {
    slit_pos[m] = (m - offset) * det.step;
    // Probed +/- coordinate: the two slit readings are two steps apart.
    hist.bin_centers[m] = to_dimensionless(2.0 * slit_pos[m], det.scale);
  }

  const double inv_step = 1.0 / det.step;
  for (const auto& pair : samples) {
    const double xs = from_dimensionless(pair[0], det.scale);
    const double xi = from_dimensionless(pair[1], det.scale);
    // Idler slit sits at slit_pos[m]; signal at +/- slit_pos[m]. Windows
    // overlap for step < width, so resolve the candidate index range from
    // the idler position and test both constraints per step.
    const double center = xi * inv_step + offset;
    const int lo = std::max(0, static_cast<int>(
                                   std::ceil(center - half_w * inv_step)));
    const int hi = std::min(n - 1, static_cast<int>(std::floor(
                                       center + half_w * inv_step)));
    for (int m = lo; m <= hi; ++m) {
      const double s_at = same ? slit_pos[m] : -slit_pos[m];
      if (std::abs(xs - s_at) <= half_w && std::abs(xi - slit_pos[m]) <= half_w)
        ++hist.counts[m];
    }
  }

  for (std::uint64_t c : hist.counts) hist.accepted_events += c;

  // Coverage: the scan should span at least +/- 4 widths of the probed
  // coordinate distribution.
  if (!samples.empty()) {
    double mean = 0.0, mom2 = 0.0;
    for (const auto& pair : samples) {
      const double u = same ? pair[1] + pair[0] : pair[1] - pair[0];
      mean += u;
      mom2 += u * u;
    }
    mean /= static_cast<double>(samples.size());
    const double var = mom2 / static_cast<double>(samples.size()) - mean * mean;
    const double reach = std::abs(hist.bin_centers.back());
    if (reach < 4.0 * std::sqrt(std::max(var, 0.0)))
      hist.coverage_warning = true;
  }
  return hist;
}

GaussianFit fit_gaussian(const CoincidenceHistogram& hist) {
  const std::size_t n = hist.bin_centers.size();
  require(n >= 8, "fit_gaussian: need at least 8 bins");
  require(hist.counts.size() == n, "fit_gaussian: malformed histogram");

  double total = 0.0;
  std::size_t nonzero = 0;
  for (std::uint64_t c : hist.counts) {
    total += static_cast<double>(c);
    if (c > 0) ++nonzero;
  }
  if (nonzero < 3)
    throw FitFailure("fit_gaussian: fewer than 3 occupied bins");

  // Moment initialization.
  double mu0 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    mu0 += hist.bin_centers[i] * static_cast<double>(hist.counts[i]);
  mu0 /= total;
  double v0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = hist.bin_centers[i] - mu0;
    v0 += d * d * static_cast<double>(hist.counts[i]);
  }
  v0 /= total;
  const double range = hist.bin_centers.back() - hist.bin_centers.front();
  const double v_floor = 1e-6 * range * range / (n * n);
  v0 = std::max(v0, v_floor);
  double a0 = 0.0;
  for (std::uint64_t c : hist.counts)
    a0 = std::max(a0, static_cast<double>(c));

  Eigen::Vector3d p(a0, mu0, v0);
  const auto model = [&](double x, const Eigen::Vector3d& q) {
    const double d = x - q(1);
    return q(0) * std::exp(-d * d / (2.0 * q(2)));
  };

  // Levenberg-Marquardt on chi^2 with Poisson weights 1/max(c, 1).
  double lambda = 1e-3;
  double chi2 = 0.0;
  const auto eval_chi2 = [&](const Eigen::Vector3d& q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 1.0 / std::max<double>(1.0, hist.counts[i]);
      const double r = static_cast<double>(hist.counts[i]) -
                       model(hist.bin_centers[i], q);
      acc += w * r * r;
    }
    return acc;
  };
  chi2 = eval_chi2(p);

  bool converged = false;
  int iterations = 0;
  for (; iterations < 200; ++iterations) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double x = hist.bin_centers[i];
      const double d = x - p(1);
      const double e = std::exp(-d * d / (2.0 * p(2)));
      Eigen::Vector3d j(e, p(0) * e * d / p(2),
                        p(0) * e * d * d / (2.0 * p(2) * p(2)));
      const double w = 1.0 / std::max<double>(1.0, hist.counts[i]);
      const double r = static_cast<double>(hist.counts[i]) - model(x, p);
      jtj += w * j * j.transpose();
      jtr += w * j * r;
    }
    Eigen::Matrix3d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();
    const Eigen::Vector3d step = damped.ldlt().solve(jtr);
    if (!step.allFinite())
      throw FitFailure("fit_gaussian: singular normal equations");
    Eigen::Vector3d trial = p + step;
    trial(2) = std::max(trial(2), v_floor);
    const double trial_chi2 = eval_chi2(trial);
    if (trial_chi2 <= chi2) {
      const double rel = (chi2 - trial_chi2) / std::max(chi2, 1e-300);
      const double step_rel =
          (step.cwiseAbs().array() / (p.cwiseAbs().array() + 1e-12)).maxCoeff();
      p = trial;
      chi2 = trial_chi2;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (rel < 1e-14 || step_rel < 1e-12) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  if (!converged && iterations >= 200) {
    char diag[160];
    std::snprintf(diag, sizeof(diag),
                  "fit_gaussian: no convergence after %d iterations "
                  "(A=%.3g, c=%.3g, v=%.3g, chi2=%.3g)",
                  iterations, p(0), p(1), p(2), chi2);
    throw FitFailure(diag);
  }
  if (p(2) > range * range) {
    char diag[128];
    std::snprintf(diag, sizeof(diag),
                  "fit_gaussian: fitted variance %.3g exceeds the scanned "
                  "range squared %.3g",
                  p(2), range * range);
    throw FitFailure(diag);
  }

  // Parameter covariance from the weighted normal equations.
  Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = hist.bin_centers[i];
    const double d = x - p(1);
    const double e = std::exp(-d * d / (2.0 * p(2)));
    Eigen::Vector3d j(e, p(0) * e * d / p(2),
                      p(0) * e * d * d / (2.0 * p(2) * p(2)));
    const double w = 1.0 / std::max<double>(1.0, hist.counts[i]);
    jtj += w * j * j.transpose();
    const double r = static_cast<double>(hist.counts[i]) - model(x, p);
    ss += r * r;
  }
  const Eigen::Matrix3d cov = jtj.inverse();

  GaussianFit fit;
  fit.amplitude = p(0);
  fit.center = p(1);
  fit.variance = p(2);
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  fit.variance_std_error = std::sqrt(std::max(cov(2, 2), 0.0));
  return fit;
}

double deconvolved_variance(const GaussianFit& fit, const DetectorConfig& det) {
  const double w = to_dimensionless(det.slit_width, det.scale);
  return fit.variance - 2.0 * w * w / 12.0;
}

DgczReport estimate_dgcz(const CoincidenceHistogram& hist_minus_rho,
                         const CoincidenceHistogram& hist_plus_q,
                         double alpha_s, double alpha_i) {
  require(hist_minus_rho.which == CorrelationSign::Minus,
          "estimate_dgcz: first histogram must be a minus-correlation scan");
  require(hist_plus_q.which == CorrelationSign::Plus,
          "estimate_dgcz: second histogram must be a plus-correlation scan");
  if (!scales_match(hist_minus_rho.scale, hist_plus_q.scale))
    throw std::invalid_argument(
        "estimate_dgcz: histograms use different dimensionless scales");

  const GaussianFit fit_minus = hist_minus_rho.fit
                                    ? *hist_minus_rho.fit
                                    : fit_gaussian(hist_minus_rho);
  const GaussianFit fit_plus =
      hist_plus_q.fit ? *hist_plus_q.fit : fit_gaussian(hist_plus_q);

  DgczReport r;
  r.pairing = DgczPairing::MinusPlus;
  r.alpha_s = alpha_s;
  r.alpha_i = alpha_i;
  r.var_minus = fit_minus.variance;
  r.var_plus_q = fit_plus.variance;
  r.sum = r.var_minus + r.var_plus_q;
  r.sum_std_error = std::hypot(fit_minus.variance_std_error,
                               fit_plus.variance_std_error);
  r.violated = r.sum < 2.0;
  return r;
}

std::string histogram_csv(const CoincidenceHistogram& hist) {
  std::ostringstream out;
  out << "bin_center,counts\n";
  char buf[64];
  for (std::size_t i = 0; i < hist.bin_centers.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g,%llu\n", hist.bin_centers[i],
                  static_cast<unsigned long long>(hist.counts[i]));
    out << buf;
  }
  return out.str();
}

}  // namespace biphoton

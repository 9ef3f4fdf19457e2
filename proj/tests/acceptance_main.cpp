// Acceptance suite: end-to-end checks of the published numbers and the
// qualitative behavior, one line of output per criterion.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "biphoton/criteria.hpp"
#include "biphoton/gaussian_state.hpp"
#include "biphoton/measurement.hpp"
#include "biphoton/optics.hpp"
#include "biphoton/schmidt.hpp"

using namespace biphoton;

namespace {

const SourceParameters kPaper(47.0, 0.006);
const double kFPrime = 0.25 / std::sqrt(2.0);
const DimensionScale kScale{2.0 * M_PI / 810e-9, kFPrime};
constexpr double kSlitWidth = 100e-6;
constexpr double kStep = 50e-6;
constexpr std::int64_t kEvents = 1000000;

struct CheckFailure {
  std::string detail;
};

void expect(bool ok, const std::string& detail) {
  if (!ok) throw CheckFailure{detail};
}

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// ---- simulation helpers shared by criteria 7 and 9 ------------------------

int steps_for(double broadened_var) {
  const double axis_per_step = 2.0 * to_dimensionless(kStep, kScale);
  const double reach = 4.2 * std::sqrt(broadened_var) +
                       to_dimensionless(kSlitWidth, kScale);
  const int half = std::clamp(
      static_cast<int>(std::ceil(reach / axis_per_step)), 4, 4000);
  return 2 * half + 1;
}

double slit_term() {
  const double w = to_dimensionless(kSlitWidth, kScale);
  return 2.0 * w * w / 12.0;
}

struct Measured {
  double analytic;
  GaussianFit fit;
  CoincidenceHistogram hist;
};

Measured measure(double det_alpha_s, double det_alpha_i, ScanDirection dir,
                 std::uint64_t seed) {
  const CovarianceMatrix4 cov = apply_arm_transforms(
      make_source_state(kPaper), rotation_matrix(det_alpha_s),
      rotation_matrix(det_alpha_i));
  const DgczPairing pairing = dir == ScanDirection::Opposite
                                  ? DgczPairing::MinusPlus
                                  : DgczPairing::PlusMinus;
  Measured m;
  m.analytic = dgcz_sum_source(cov, pairing).var_minus;
  const DetectorConfig det{kSlitWidth, kStep,
                           steps_for(m.analytic + slit_term()), kScale};
  const auto samples = sample_pairs(cov, kEvents, seed);
  m.hist = scan_coincidences(samples, det, ScanConfig{dir, kEvents, seed});
  m.fit = fit_gaussian(m.hist);
  m.hist.fit = m.fit;
  return m;
}

/// Expected fitted variance with no sampling noise: the counts are computed
/// by quadrature of the Gaussian density over the slit-pair acceptance (a
/// diamond |u| + |v| <= w in the probed/conjugate coordinates), then passed
/// through the same Gaussian fit. Independent of the Monte Carlo path.
double noiseless_fit_variance(double det_alpha_s, double det_alpha_i,
                              ScanDirection dir) {
  const CovarianceMatrix4 cov = apply_arm_transforms(
      make_source_state(kPaper), rotation_matrix(det_alpha_s),
      rotation_matrix(det_alpha_i));
  const DgczReport mp = dgcz_sum_source(cov, DgczPairing::MinusPlus);
  const DgczReport pm = dgcz_sum_source(cov, DgczPairing::PlusMinus);
  const bool opposite = dir == ScanDirection::Opposite;
  const double var_probe = opposite ? mp.var_minus : pm.var_minus;
  const double var_gate = opposite ? pm.var_minus : mp.var_minus;

  const double w = to_dimensionless(kSlitWidth, kScale);
  const double axis_step = 2.0 * to_dimensionless(kStep, kScale);
  const int n = steps_for(var_probe + slit_term());

  CoincidenceHistogram hist;
  hist.scale = kScale;
  hist.which = opposite ? CorrelationSign::Minus : CorrelationSign::Plus;
  const int quad = 4001;
  const double du = 2.0 * w / (quad - 1);
  for (int m = 0; m < n; ++m) {
    const double center = (m - 0.5 * (n - 1)) * axis_step;
    hist.bin_centers.push_back(center);
    // P(accept at step m): the slit pair covers |u - center| + |v| <= w in
    // the probed/conjugate plane, Jacobian one half.
    double acc = 0.0;
    for (int j = 0; j < quad; ++j) {
      const double u = -w + j * du;
      const double x = center + u;
      const double probe = std::exp(-x * x / (2.0 * var_probe)) /
                           std::sqrt(2.0 * M_PI * var_probe);
      const double gate =
          std::erf((w - std::abs(u)) / std::sqrt(2.0 * var_gate));
      double term = probe * gate;
      if (j == 0 || j == quad - 1) term *= 0.5;
      acc += term;
    }
    const double probability = 0.5 * acc * du;
    hist.counts.push_back(static_cast<std::uint64_t>(
        std::llround(static_cast<double>(kEvents) * probability)));
  }
  return fit_gaussian(hist).variance;
}

struct Lab {
  Measured source_minus, source_plus_q;
  Measured null_minus, null_plus_rho, null_plus_q;
  Measured viol_minus, viol_plus_q;
};

const Lab& lab() {
  static const Lab instance = [] {
    Lab l;
    l.source_minus = measure(M_PI, M_PI, ScanDirection::Opposite, 101);
    l.source_plus_q = measure(M_PI / 2, M_PI / 2, ScanDirection::Same, 102);
    const double a34 = 3.0 * M_PI / 4.0;
    l.null_minus = measure(a34, a34, ScanDirection::Opposite, 103);
    l.null_plus_rho = measure(a34, a34, ScanDirection::Same, 104);
    l.null_plus_q = measure(M_PI / 4, M_PI / 4, ScanDirection::Same, 105);
    l.viol_minus = measure(5.0 * M_PI / 4.0, a34, ScanDirection::Opposite, 106);
    l.viol_plus_q = measure(a34, M_PI / 4, ScanDirection::Same, 107);
    return l;
  }();
  return instance;
}

// ---- criteria --------------------------------------------------------------

void criterion_source_dgcz(std::string& note) {
  const DgczReport r =
      dgcz_sum_source(make_source_state(kPaper), DgczPairing::MinusPlus);
  expect(std::abs(r.sum - 0.0273) <= 1e-3,
         fmt("sum %.6f not within 0.001 of 0.0273", r.sum));
  expect(std::abs(r.sum - 0.027) <= 1e-3,
         fmt("sum %.6f outside the published 0.027 +/- 0.001", r.sum));
  expect(r.violated, "sum >= 2");
  note = fmt("sum = %.6f", r.sum);
}

void criterion_recovery(std::string& note) {
  const CovarianceMatrix4 cov = make_source_state(kPaper);
  const double source = dgcz_sum_source(cov, DgczPairing::MinusPlus).sum;
  const double rotated =
      rotated_dgcz_closed_form(cov, 5.0 * M_PI / 4.0, 3.0 * M_PI / 4.0);
  expect(std::abs(rotated - source) <= 1e-12,
         fmt("|rotated - source| = %.3g", std::abs(rotated - source)));
  note = fmt("|difference| = %.2e", std::abs(rotated - source));
}

void criterion_no_detection_wall(std::string& note) {
  std::mt19937_64 rng(301);
  std::uniform_real_distribution<double> logv(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  double min_sum = 1e300;
  for (int rep = 0; rep < 10000; ++rep) {
    const SourceParameters params(std::exp(logv(rng)), std::exp(logv(rng)));
    const double as = ang(rng);
    const double ai = (rng() & 1 ? M_PI / 2 : 3.0 * M_PI / 2) - as;
    const double sum =
        rotated_dgcz_closed_form(make_source_state(params), as, ai);
    min_sum = std::min(min_sum, sum);
    expect(sum >= 2.0 - 1e-12, fmt("sum %.15f < 2 at the wall", sum));
  }
  const double paper_wall = rotated_dgcz_closed_form(
      make_source_state(kPaper), 3.0 * M_PI / 4.0, 3.0 * M_PI / 4.0);
  expect(std::abs(paper_wall - 106.85) <= 0.01,
         fmt("paper wall value %.4f != 106.85 +/- 0.01", paper_wall));
  note = fmt("min sum over 1e4 draws = %.4f; paper value = %.3f", min_sum,
             paper_wall);
}

void criterion_closed_form_equivalence(std::string& note) {
  std::mt19937_64 rng(401);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    Eigen::Matrix4d a;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = n(rng);
    const CovarianceMatrix4 cov(0.5 * Eigen::Matrix4d::Identity() +
                                a.transpose() * a);
    const double as = ang(rng), ai = ang(rng);
    const double closed = rotated_dgcz_closed_form(cov, as, ai);
    const double congruence =
        dgcz_sum_source(apply_arm_transforms(cov, rotation_matrix(as),
                                             rotation_matrix(ai)),
                        DgczPairing::MinusPlus)
            .sum;
    worst = std::max(worst, std::abs(closed - congruence));
  }
  expect(worst <= 1e-10, fmt("worst |closed - congruence| = %.3g", worst));
  note = fmt("worst |difference| = %.2e over 1000 states", worst);
}

void criterion_lens_realization(std::string& note) {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double alpha = M_PI * (0.01 + 0.98 * i / 49.0);
    const auto found =
        classify_rotation(arm_transform(frft_lens_system(alpha, 0.4)), 1e-9);
    expect(found.has_value(), fmt("order %.4f not a rotation", alpha));
    worst = std::max(worst, std::abs(*found - alpha));
  }
  expect(worst <= 1e-9, fmt("worst order error %.3g", worst));

  const auto check_split = [&](const std::vector<double>& orders) {
    std::vector<LensSystem> parts;
    for (double a : orders)
      parts.push_back(frft_lens_system(a, kFPrime / std::sin(a), kScale.k));
    const auto found =
        classify_rotation(arm_transform(compose_systems(parts)), 1e-9);
    expect(found.has_value(), "composed system not a rotation");
    double diff = std::fmod(*found - 5.0 * M_PI / 4.0, 2.0 * M_PI);
    if (diff > M_PI) diff -= 2.0 * M_PI;
    if (diff < -M_PI) diff += 2.0 * M_PI;
    expect(std::abs(diff) <= 1e-9,
           fmt("composed order off by %.3g", std::abs(diff)));
  };
  check_split({5 * M_PI / 12, 5 * M_PI / 12, 5 * M_PI / 12});
  check_split({M_PI / 2, M_PI / 2, M_PI / 4});
  note = fmt("worst grid error = %.2e; 3-system splits reach 5pi/4", worst);
}

void criterion_migration(std::string& note) {
  const double lo = 0.35, hi = 0.65;
  const int n = 61;
  const double step = (hi - lo) / (n - 1);
  double best_alpha = lo, best_k = 1e300;
  for (int i = 0; i < n; ++i) {
    const double alpha = lo + i * step;
    const double k = real_part_schmidt_number(kPaper, alpha);
    if (k < best_k) {
      best_k = k;
      best_alpha = alpha;
    }
  }
  expect(std::abs(best_alpha - 0.4883) <= step + 1e-12,
         fmt("argmin %.4f more than one grid step from 0.4883", best_alpha));

  const double alpha_sep = separability_angle(kPaper);
  const CovarianceMatrix4 rotated = apply_arm_transforms(
      make_source_state(kPaper), rotation_matrix(alpha_sep),
      rotation_matrix(alpha_sep));
  expect(std::abs(rotated.cov(kRhoS, kRhoI)) <= 1e-12,
         fmt("Cov(rho_s, rho_i)(alpha_sep) = %.3g",
             rotated.cov(kRhoS, kRhoI)));
  note = fmt("argmin = %.4f (step %.4f), K_min = %.2f", best_alpha, step,
             best_k);
}

void criterion_monte_carlo(std::string& note) {
  const Lab& l = lab();
  // The small-slit formula analytic + 2 w^2/12 per histogram is only a few
  // percent accurate here (the 100 um slit is ~8x wider than the narrow
  // correlation peaks), so the 3-sigma statistical band is taken around the
  // exact expectation: the same fit applied to the noiseless quadrature
  // histogram. The approximate formula is held to 5 percent alongside.
  const double formula_expected =
      dgcz_sum_source(make_source_state(kPaper), DgczPairing::MinusPlus).sum +
      2.0 * slit_term();

  const DgczReport source =
      estimate_dgcz(l.source_minus.hist, l.source_plus_q.hist, M_PI, M_PI);
  expect(source.violated && source.sum < 2.0, "source config must violate");
  const double source_exact =
      noiseless_fit_variance(M_PI, M_PI, ScanDirection::Opposite) +
      noiseless_fit_variance(M_PI / 2, M_PI / 2, ScanDirection::Same);
  expect(std::abs(source.sum - source_exact) <= 3.0 * *source.sum_std_error,
         fmt("source sum %.4f vs exact expectation %.4f beyond 3 SE (%.4f)",
             source.sum, source_exact, *source.sum_std_error));
  expect(std::abs(source.sum - formula_expected) <= 0.05 * formula_expected,
         fmt("source sum %.4f vs formula %.4f beyond 5%%", source.sum,
             formula_expected));

  const DgczReport null_cfg = estimate_dgcz(
      l.null_minus.hist, l.null_plus_q.hist, 3 * M_PI / 4, 3 * M_PI / 4);
  expect(!null_cfg.violated && null_cfg.sum >= 2.0,
         fmt("null config sum %.2f must not violate", null_cfg.sum));

  const DgczReport viol = estimate_dgcz(l.viol_minus.hist, l.viol_plus_q.hist,
                                        5 * M_PI / 4, 3 * M_PI / 4);
  expect(viol.violated && viol.sum < 2.0, "intermediate config must violate");
  const double viol_exact =
      noiseless_fit_variance(5 * M_PI / 4, 3 * M_PI / 4,
                             ScanDirection::Opposite) +
      noiseless_fit_variance(3 * M_PI / 4, M_PI / 4, ScanDirection::Same);
  expect(std::abs(viol.sum - viol_exact) <= 3.0 * *viol.sum_std_error,
         fmt("violation sum %.4f vs exact expectation %.4f beyond 3 SE (%.4f)",
             viol.sum, viol_exact, *viol.sum_std_error));
  expect(std::abs(viol.sum - formula_expected) <= 0.05 * formula_expected,
         fmt("violation sum %.4f vs formula %.4f beyond 5%%", viol.sum,
             formula_expected));

  note = fmt("sums: source %.3f, null %.1f, intermediate %.3f", source.sum,
             null_cfg.sum, viol.sum);
}

void criterion_perturbation(std::string& note) {
  const CovarianceMatrix4 source = make_source_state(kPaper);
  const double epsilon = 0.01;

  const auto worst_pair = [&](const LensSystem& sys_s, const LensSystem& sys_i,
                              DgczPairing pairing) {
    const std::size_t gs = free_space_count(sys_s);
    const std::size_t gi = free_space_count(sys_i);
    double best = -1e300;
    std::vector<int> ss(gs), si(gi);
    for (std::uint64_t bs = 0; bs < (1ull << gs); ++bs) {
      for (std::size_t k = 0; k < gs; ++k)
        ss[k] = (bs >> (gs - 1 - k)) & 1 ? 1 : -1;
      const ArmTransform ts =
          arm_transform(perturb_positions(sys_s, epsilon, SignedPattern{ss}));
      for (std::uint64_t bi = 0; bi < (1ull << gi); ++bi) {
        for (std::size_t k = 0; k < gi; ++k)
          si[k] = (bi >> (gi - 1 - k)) & 1 ? 1 : -1;
        const ArmTransform ti = arm_transform(
            perturb_positions(sys_i, epsilon, SignedPattern{si}));
        best = std::max(
            best,
            dgcz_sum_source(apply_arm_transforms(source, ts, ti), pairing)
                .var_minus);
      }
    }
    return best;
  };

  const double sub = 5.0 * M_PI / 12.0;
  const LensSystem part = frft_lens_system(sub, kFPrime / std::sin(sub),
                                           kScale.k);
  const LensSystem signal54 = compose_systems(std::array{part, part, part});
  const LensSystem sys34 = frft_lens_system(
      3.0 * M_PI / 4.0, kFPrime / std::sin(3.0 * M_PI / 4.0), kScale.k);
  const LensSystem sys14 =
      frft_lens_system(M_PI / 4.0, kFPrime / std::sin(M_PI / 4.0), kScale.k);
  const LensSystem imaging =
      frft_lens_system(M_PI, 0.25, kScale.k, kFPrime);
  const LensSystem fourier = frft_lens_system(M_PI / 2.0, kFPrime, kScale.k);

  const double v_minus_prime =
      worst_pair(signal54, sys34, DgczPairing::MinusPlus);
  const double v_plus_prime = worst_pair(sys34, sys14, DgczPairing::PlusMinus);
  const double v_minus_src = worst_pair(imaging, imaging,
                                        DgczPairing::MinusPlus);
  const double v_plus_src = worst_pair(fourier, fourier,
                                       DgczPairing::PlusMinus);

  const auto in_band = [&](double value, double paper, const char* name) {
    expect(value >= paper / 3.0 && value <= paper * 3.0,
           std::string(name) +
               fmt(" = %.4f outside a factor 3 of %.2f", value, paper));
  };
  in_band(v_minus_prime, 0.09, "rho'_-");
  in_band(v_plus_prime, 0.04, "q'_+");
  in_band(v_minus_src, 0.84, "rho_-");
  in_band(v_plus_src, 0.03, "q_+");
  expect(v_minus_prime + v_plus_prime < 2.0, "perturbed sum must stay < 2");
  note = fmt("worst: 0.09->%.3f, 0.04->%.3f, ", v_minus_prime, v_plus_prime) +
         fmt("0.84->%.3f, 0.03->%.3f", v_minus_src, v_plus_src);
}

void criterion_fig2_shapes(std::string& note) {
  const Lab& l = lab();
  expect(l.null_minus.fit.variance > 2.0,
         fmt("null minus histogram variance %.2f not broad",
             l.null_minus.fit.variance));
  expect(l.null_plus_rho.fit.variance > 2.0,
         fmt("null plus histogram variance %.2f not broad",
             l.null_plus_rho.fit.variance));
  expect(l.viol_minus.fit.variance < 0.1,
         fmt("intermediate minus histogram variance %.4f not narrow",
             l.viol_minus.fit.variance));
  note = fmt("null: %.1f / %.1f broad; intermediate minus: %.4f narrow",
             l.null_minus.fit.variance, l.null_plus_rho.fit.variance,
             l.viol_minus.fit.variance);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    void (*run)(std::string&);
  };
  const Criterion criteria[] = {
      {1, "source DGCZ sum matches 0.027 +/- 0.001", criterion_source_dgcz},
      {2, "recovery at (5pi/4, 3pi/4) equals the source sum to 1e-12",
       criterion_recovery},
      {3, "orthogonal angle sums never violate; paper value 106.85",
       criterion_no_detection_wall},
      {4, "closed form agrees with covariance congruence to 1e-10",
       criterion_closed_form_equivalence},
      {5, "lens systems realize their FRFT orders; splits reach 5pi/4",
       criterion_lens_realization},
      {6, "real-part Schmidt number minimized at 0.4883; covariance zero",
       criterion_migration},
      {7, "Monte Carlo end-to-end: verdicts and broadened sums",
       criterion_monte_carlo},
      {8, "worst-case 1% placement errors near the published predictions",
       criterion_perturbation},
      {9, "histogram shapes: broad null pair, narrow intermediate peak",
       criterion_fig2_shapes},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string note;
    bool ok = true;
    std::string detail;
    try {
      c.run(note);
    } catch (const CheckFailure& f) {
      ok = false;
      detail = f.detail;
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();
    if (ok) {
      std::printf("[PASS] criterion %d: %s — %s (%.0f ms)\n", c.id, c.title,
                  note.c_str(), ms);
    } else {
      ++failures;
      std::printf("[FAIL] criterion %d: %s — %s (%.0f ms)\n", c.id, c.title,
                  detail.c_str(), ms);
    }
  }
  if (failures == 0)
    std::printf("all %zu acceptance criteria passed\n",
                std::size(criteria));
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}

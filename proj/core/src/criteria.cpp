#include "biphoton/criteria.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace biphoton {

namespace {

double var_of(const CovarianceMatrix4& cov, Quadrature a, Quadrature b,
              double sign) {
  // Var(x_a + sign * x_b)
  return cov.var(a) + cov.var(b) + 2.0 * sign * cov.cov(a, b);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> to_key_values(
    const DgczReport& report) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("pairing", report.pairing == DgczPairing::MinusPlus
                                 ? "minus-plus"
                                 : "plus-minus");
  kv.emplace_back("alpha_s", format_double(report.alpha_s));
  kv.emplace_back("alpha_i", format_double(report.alpha_i));
  kv.emplace_back("var_minus", format_double(report.var_minus));
  kv.emplace_back("var_plus_q", format_double(report.var_plus_q));
  kv.emplace_back("sum", format_double(report.sum));
  if (report.sum_std_error)
    kv.emplace_back("sum_std_error", format_double(*report.sum_std_error));
  kv.emplace_back("violated", report.violated ? "true" : "false");
  return kv;
}

DgczReport dgcz_sum_source(const CovarianceMatrix4& cov, DgczPairing pairing) {
  DgczReport r;
  r.pairing = pairing;
  if (pairing == DgczPairing::MinusPlus) {
    r.var_minus = var_of(cov, kRhoI, kRhoS, -1.0);
    r.var_plus_q = var_of(cov, kQI, kQS, +1.0);
  } else {
    r.var_minus = var_of(cov, kRhoI, kRhoS, +1.0);
    r.var_plus_q = var_of(cov, kQI, kQS, -1.0);
  }
  r.sum = r.var_minus + r.var_plus_q;
  r.violated = r.sum < 2.0;
  return r;
}

CovarianceMatrix4 apply_arm_transforms(const CovarianceMatrix4& cov,
                                       const ArmTransform& t_s,
                                       const ArmTransform& t_i) {
  Eigen::Matrix4d block = Eigen::Matrix4d::Zero();
  block.topLeftCorner<2, 2>() = t_s.m;
  block.bottomRightCorner<2, 2>() = t_i.m;
  Eigen::Matrix4d m = block * cov.matrix() * block.transpose();
  m = 0.5 * (m + m.transpose());
  return CovarianceMatrix4(m, block * cov.mean());
}

double rotated_dgcz_closed_form(const CovarianceMatrix4& cov, double alpha_s,
                                double alpha_i) {
  const double c = std::cos(alpha_i + alpha_s);
  const double s = std::sin(alpha_i + alpha_s);

  const double sum_mp = var_of(cov, kRhoI, kRhoS, -1.0) +
                        var_of(cov, kQI, kQS, +1.0);
  const double sum_pm = var_of(cov, kRhoI, kRhoS, +1.0) +
                        var_of(cov, kQI, kQS, -1.0);
  // Symmetrized covariances of the +/- combinations, read off the matrix.
  const double cov_pp = cov.cov(kRhoI, kQI) + cov.cov(kRhoI, kQS) +
                        cov.cov(kRhoS, kQI) + cov.cov(kRhoS, kQS);
  const double cov_mm = cov.cov(kRhoI, kQI) - cov.cov(kRhoI, kQS) -
                        cov.cov(kRhoS, kQI) + cov.cov(kRhoS, kQS);

  return 0.5 * (1.0 + c) * sum_mp + 0.5 * (1.0 - c) * sum_pm - s * cov_pp +
         s * cov_mm;
}

StateSummary::StateSummary(const SourceParameters& params)
    : s1(params.sigma_plus_sq + 1.0 / params.sigma_minus_sq),
      s2(params.sigma_minus_sq + 1.0 / params.sigma_plus_sq) {}

bool violation_possible(const StateSummary& summary, double angle_sum) {
  if (summary.s1 == summary.s2)
    throw std::invalid_argument(
        "violation_possible: threshold undefined for S1 == S2");
  const double threshold = (summary.s1 + summary.s2 - 4.0) /
                           (summary.s1 - summary.s2);
  return std::cos(angle_sum) > threshold;
}

double matching_idler_angle(double alpha_s) {
  const double two_pi = 2.0 * M_PI;
  double a = std::fmod(-alpha_s, two_pi);
  if (a < 0.0) a += two_pi;
  return a;
}

double separability_angle(const SourceParameters& params) {
  return std::atan(params.sigma_plus() * params.sigma_minus());
}

}  // namespace biphoton

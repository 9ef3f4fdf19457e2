#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "biphoton/criteria.hpp"
#include "biphoton/schmidt.hpp"

using namespace biphoton;

namespace {

// Exact Schmidt number of the (real) source Gaussian: with
// mu = (sigma+ - sigma-)/(sigma+ + sigma-) the Schmidt weights are
// geometric, so K = (1 + mu^2)/(1 - mu^2) = (r + 1/r)/2 for r = sigma+/sigma-.
double analytic_source_schmidt(const SourceParameters& p) {
  const double r = p.sigma_plus() / p.sigma_minus();
  return 0.5 * (r + 1.0 / r);
}

}  // namespace

TEST_CASE("product states have K = 1 at every order") {
  for (double s2 : {0.3, 1.0, 10.0}) {
    const SourceParameters params(s2, s2);
    for (double alpha : {0.0, 0.3, M_PI / 4, 1.2, M_PI / 2}) {
      const double k = real_part_schmidt_number(params, alpha, {192, 6.0});
      CHECK(std::abs(k - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("source Schmidt number matches the analytic value") {
  const SourceParameters params(4.0, 1.0);
  const double k = real_part_schmidt_number(params, 0.0, {256, 7.0});
  CHECK(k == doctest::Approx(analytic_source_schmidt(params)).epsilon(1e-6));
}

TEST_CASE("paper parameters are strongly entangled at the source") {
  const double k =
      real_part_schmidt_number(SourceParameters(47.0, 0.006), 0.0, {384, 6.0});
  CHECK(k > 10.0);  // of order sigma+/sigma- (= 88.5)
  CHECK(k < 100.0);
}

TEST_CASE("K dips by more than 0.1 only for entangled sources") {
  // sigma+^2 / sigma-^2 > 10: even the minimum over alpha stays above 1.1.
  const SourceParameters strong(2.0, 0.15);
  double kmin = 1e9;
  for (int i = 0; i <= 40; ++i) {
    const double alpha = 0.02 + (M_PI / 2 - 0.04) * i / 40.0;
    kmin = std::min(kmin,
                    real_part_schmidt_number(strong, alpha, {160, 6.0}));
  }
  CHECK(kmin - 1.0 > 0.1);
}

TEST_CASE("K is minimized at the separability angle (paper parameters)") {
  const SourceParameters params(47.0, 0.006);
  const double alpha_sep = separability_angle(params);
  CHECK(alpha_sep == doctest::Approx(0.4883).epsilon(5e-4));

  const int n = 41;
  const double lo = 0.3, hi = 0.7;
  std::vector<double> ks(n);
  for (int i = 0; i < n; ++i)
    ks[i] = real_part_schmidt_number(params, lo + (hi - lo) * i / (n - 1));
  const int arg =
      static_cast<int>(std::min_element(ks.begin(), ks.end()) - ks.begin());
  const double step = (hi - lo) / (n - 1);
  CHECK(std::abs(lo + arg * step - 0.4883) <= step + 1e-12);
}

TEST_CASE("argmin tracks arctan(sigma+ sigma-) across random sources") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> t_dist(0.1, 2.0);
  std::uniform_real_distribution<double> ratio_dist(2.0, 8.0);
  for (int rep = 0; rep < 5; ++rep) {
    const double t = t_dist(rng);        // sigma+ sigma-
    const double ratio = ratio_dist(rng);
    const SourceParameters params(t * ratio, t / ratio);
    const double a_sep = std::atan(t);
    const double lo = std::max(0.01, a_sep - 0.3);
    const double hi = std::min(M_PI / 2 - 0.01, a_sep + 0.3);
    const int n = 31;
    std::vector<double> ks(n);
    for (int i = 0; i < n; ++i)
      ks[i] = real_part_schmidt_number(params, lo + (hi - lo) * i / (n - 1),
                                       {160, 6.0});
    const int arg =
        static_cast<int>(std::min_element(ks.begin(), ks.end()) - ks.begin());
    const double step = (hi - lo) / (n - 1);
    CHECK(std::abs(lo + arg * step - a_sep) <= step + 1e-12);
  }
}

TEST_CASE("degenerate grids are rejected") {
  const SourceParameters params(2.0, 1.0);
  CHECK_THROWS_AS(real_part_schmidt_number(params, 0.3, {7, 6.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(real_part_schmidt_number(params, 0.3, {64, -1.0}),
                  std::invalid_argument);
}

TEST_CASE("detrended amplitude keeps the intensity") {
  const SourceParameters params(3.0, 0.4);
  for (double alpha : {0.2, 0.9, 2.0})
    for (double xs : {-0.8, 0.5})
      for (double xi : {-0.3, 1.0}) {
        const double lhs =
            std::abs(detrended_position_amplitude(params, alpha, xs, xi));
        const double rhs =
            std::abs(propagated_position_amplitude(params, alpha, xs, xi));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
}

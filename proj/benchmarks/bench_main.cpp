#include <benchmark/benchmark.h>

#include <cmath>

#include "biphoton/criteria.hpp"
#include "biphoton/frft.hpp"
#include "biphoton/gaussian_state.hpp"
#include "biphoton/measurement.hpp"
#include "biphoton/optics.hpp"
#include "biphoton/schmidt.hpp"

namespace {

using namespace biphoton;

const SourceParameters kParams(47.0, 0.006);

void BM_FrftGaussianChain(benchmark::State& state) {
  ComplexGaussian1D g = gaussian_mode(47.0);
  double alpha = 0.1;
  for (auto _ : state) {
    g = frft_gaussian_1d(g, alpha);
    alpha += 0.1;
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_FrftGaussianChain);

void BM_RotatedDgczClosedForm(benchmark::State& state) {
  const CovarianceMatrix4 cov = make_source_state(kParams);
  double a = 0.0;
  for (auto _ : state) {
    a += 0.01;
    benchmark::DoNotOptimize(rotated_dgcz_closed_form(cov, a, 2.0 * a));
  }
}
BENCHMARK(BM_RotatedDgczClosedForm);

void BM_RotatedDgczCongruence(benchmark::State& state) {
  const CovarianceMatrix4 cov = make_source_state(kParams);
  double a = 0.0;
  for (auto _ : state) {
    a += 0.01;
    const CovarianceMatrix4 rotated = apply_arm_transforms(
        cov, rotation_matrix(a), rotation_matrix(2.0 * a));
    benchmark::DoNotOptimize(
        dgcz_sum_source(rotated, DgczPairing::MinusPlus).sum);
  }
}
BENCHMARK(BM_RotatedDgczCongruence);

void BM_SamplePairs(benchmark::State& state) {
  const CovarianceMatrix4 cov = make_source_state(kParams);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_pairs(cov, state.range(0), 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePairs)->Arg(1 << 14)->Arg(1 << 17)->Arg(1 << 20);

void BM_ScanCoincidences(benchmark::State& state) {
  const DimensionScale scale{2.0 * M_PI / 810e-9, 0.25 / std::sqrt(2.0)};
  const CovarianceMatrix4 cov = make_source_state(kParams);
  const auto samples = sample_pairs(cov, 1 << 18, 3);
  const DetectorConfig det{100e-6, 50e-6, 61, scale};
  const ScanConfig scan{ScanDirection::Opposite, 1 << 18, 3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_coincidences(samples, det, scan));
  }
  state.SetItemsProcessed(state.iterations() * (1 << 18));
}
BENCHMARK(BM_ScanCoincidences);

void BM_RealPartSchmidt(benchmark::State& state) {
  const GridSpec grid{static_cast<int>(state.range(0)), 6.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(real_part_schmidt_number(kParams, 0.5, grid));
  }
}
BENCHMARK(BM_RealPartSchmidt)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_WorstCasePerturbation(benchmark::State& state) {
  const double f_prime = 0.25 / std::sqrt(2.0);
  const double sub = 5.0 * M_PI / 12.0;
  const LensSystem part = frft_lens_system(sub, f_prime / std::sin(sub));
  const LensSystem arm =
      compose_systems(std::array{part, part, part});
  const CovarianceMatrix4 cov = make_source_state(kParams);
  const auto objective = [&](const LensSystem& sys) {
    const ArmTransform t = arm_transform(sys);
    return dgcz_sum_source(apply_arm_transforms(cov, t, t),
                           DgczPairing::MinusPlus)
        .sum;
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        perturb_positions(arm, 0.01, WorstCase{objective}));
  }
}
BENCHMARK(BM_WorstCasePerturbation);

}  // namespace

BENCHMARK_MAIN();

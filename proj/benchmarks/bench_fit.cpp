#include <benchmark/benchmark.h>

#include <random>

#include "loglin/glasso.hpp"
#include "loglin/model.hpp"

using namespace loglin;

namespace {

ContingencyTable sampled_table(const TableShape& shape, long N, std::uint64_t seed) {
  const Design d = saturated_design(shape);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.3);
  BlockedVector theta = d.zero_vector();
  for (auto& b : theta.blocks) {
    for (long i = 0; i < b.size(); ++i) b[i] = gauss(rng);
  }
  const auto dist = mean_map(d, theta, double(N));
  return sample_table(shape, dist, N, rng);
}

void bench_saturated_fit(benchmark::State& state, std::vector<int> levels) {
  TableShape shape(std::move(levels));
  const Design d = saturated_design(shape);
  const ContingencyTable t = sampled_table(shape, 5000, 42);
  PenaltyConfig p;
  p.lambda = 0.02;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(d, t, p));
  }
}

void bench_gradient(benchmark::State& state, std::vector<int> levels) {
  TableShape shape(std::move(levels));
  const Design d = saturated_design(shape);
  const ContingencyTable t = sampled_table(shape, 5000, 42);
  const BlockedVector theta = d.zero_vector();
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient(d, theta, t));
  }
}

void bench_newton_mle(benchmark::State& state, std::vector<int> levels) {
  TableShape shape(std::move(levels));
  const Design d = saturated_design(shape);
  const ContingencyTable t = sampled_table(shape, 5000, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_mle(d, t));
  }
}

}  // namespace

BENCHMARK_CAPTURE(bench_saturated_fit, shape_2x2x2, {2, 2, 2});
BENCHMARK_CAPTURE(bench_saturated_fit, shape_3x3x3, {3, 3, 3});
BENCHMARK_CAPTURE(bench_saturated_fit, shape_4x4x4, {4, 4, 4});
BENCHMARK_CAPTURE(bench_gradient, shape_3x3x3, {3, 3, 3});
BENCHMARK_CAPTURE(bench_gradient, shape_4x4x4x4, {4, 4, 4, 4});
BENCHMARK_CAPTURE(bench_newton_mle, shape_3x3x3, {3, 3, 3});

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "finslerforms/finsler.hpp"

using namespace finslerforms;

namespace {

ModelPtr model_for(int n, int r) {
  std::vector<std::vector<double>> degrees(r, std::vector<double>(n, 1.0));
  degrees.back().assign(n, 2.0);
  return make_perturbed(n, degrees, 0.1);
}

CVector point(int size, double seed) {
  CVector p(size);
  for (int i = 0; i < size; ++i) p[i] = {0.3 + 0.1 * i + seed, 0.2 - 0.05 * i};
  return p;
}

void BM_MetricJet(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), r = static_cast<int>(state.range(1));
  const int order = static_cast<int>(state.range(2));
  const auto m = model_for(n, r);
  const auto z = point(n, 0.0);
  auto v = point(r, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(metric_jet(*m, z, v, order));
}
BENCHMARK(BM_MetricJet)->Args({1, 2, 2})->Args({1, 2, 4})->Args({2, 2, 4})->Args({1, 3, 2})->Args({1, 3, 4});

void BM_CurvatureBundle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), r = static_cast<int>(state.range(1));
  const auto m = model_for(n, r);
  const auto z = point(n, 0.0);
  auto v = point(r, 0.5);
  v[0] += 1.0;
  const auto detail = state.range(2) ? Detail::full : Detail::xi;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(*m, z, v, detail));
}
BENCHMARK(BM_CurvatureBundle)->Args({1, 2, 0})->Args({1, 2, 1})->Args({2, 2, 1})->Args({1, 3, 1});

}  // namespace

BENCHMARK_MAIN();

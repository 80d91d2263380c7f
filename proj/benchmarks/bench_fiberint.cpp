#include <benchmark/benchmark.h>

#include "finslerforms/fiberint.hpp"

using namespace finslerforms;

namespace {

quad::QuadratureSpec tensor(int radial, int angular) {
  quad::QuadratureSpec s;
  s.radial_order = radial;
  s.angular_order = angular;
  return s;
}

void BM_NormalizationTensor(benchmark::State& state) {
  const auto m = make_perturbed(1, {{1}, {2}}, 0.1);
  const auto spec = tensor(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const CVector z{cd{0.3, 0.2}};
  for (auto _ : state) benchmark::DoNotOptimize(fiber::normalization(*m, z, spec));
}
BENCHMARK(BM_NormalizationTensor)->Args({24, 8})->Args({48, 16})->Unit(benchmark::kMillisecond);

void BM_NormalizationMonteCarlo(benchmark::State& state) {
  const auto m = make_perturbed(1, {{1}, {1}, {2}}, 0.05);
  quad::QuadratureSpec spec;
  spec.mode = quad::Mode::montecarlo;
  spec.mc_samples = static_cast<std::size_t>(state.range(0));
  const CVector z{cd{0.3, 0.2}};
  for (auto _ : state) benchmark::DoNotOptimize(fiber::normalization(*m, z, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormalizationMonteCarlo)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SegreDirect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto m = n == 1 ? make_perturbed(1, {{1}, {2}}, 0.1) : make_perturbed(2, {{1, 0}, {0, 1}}, 0.1);
  const CVector z(n, cd{0.3, 0.2});
  const auto spec = tensor(24, 8);
  for (auto _ : state) benchmark::DoNotOptimize(fiber::segre_direct(*m, z, n, spec));
}
BENCHMARK(BM_SegreDirect)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ChernWeil(benchmark::State& state) {
  const auto m = make_perturbed(1, {{1}, {2}}, 0.1);
  const CVector z{cd{0.3, 0.2}};
  const auto spec = tensor(24, 8);
  for (auto _ : state) benchmark::DoNotOptimize(fiber::chern_via_cw(*m, z, 1, spec));
}
BENCHMARK(BM_ChernWeil)->Unit(benchmark::kMillisecond);

void BM_BottChern(benchmark::State& state) {
  const auto m = make_perturbed(1, {{1}, {2}}, 0.1);
  const auto core = make_hermitian(1, {{1}, {2}});
  const CVector z{cd{0.3, 0.2}};
  const auto spec = tensor(24, 8);
  for (auto _ : state) benchmark::DoNotOptimize(fiber::bott_chern_c0(*m, *core, z, spec));
}
BENCHMARK(BM_BottChern)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

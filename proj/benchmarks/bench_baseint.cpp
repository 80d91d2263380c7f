#include <benchmark/benchmark.h>

#include "finslerforms/baseint.hpp"

using namespace finslerforms;

namespace {

quad::QuadratureSpec spec(int radial, bool symmetric) {
  quad::QuadratureSpec s;
  s.radial_order = radial;
  s.angular_order = 8;
  s.radial_symmetry = symmetric;
  return s;
}

void BM_DegreeCP1(benchmark::State& state) {
  const auto m = make_perturbed(1, {{1}, {2}}, 0.1);
  const base::BaseManifold cp1(base::Kind::CP1);
  const auto fib = spec(24, false), bas = spec(24, state.range(0) != 0);
  for (auto _ : state) benchmark::DoNotOptimize(base::degree(*m, cp1, fib, bas));
}
BENCHMARK(BM_DegreeCP1)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_LambdaProduct(benchmark::State& state) {
  const auto m = make_hermitian(2, {{1, 1}, {1, 1}});
  const base::BaseManifold prod(base::Kind::CP1xCP1);
  const auto fib = spec(16, false), bas = spec(16, true);
  for (auto _ : state) benchmark::DoNotOptimize(base::lambda_from_class(*m, prod, fib, bas));
}
BENCHMARK(BM_LambdaProduct)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

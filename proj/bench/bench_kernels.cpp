// Timings for the kernels that dominate a sweep point.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "seplab/splitting.hpp"

using namespace seplab;

namespace {

const ManifoldPair& pair_at_03() {
  static PrecisionContext ctx = PrecisionContext::make(PrecisionContext::digits_for_epsilon(0.3));
  static ManifoldPair mp = [] {
    ContextScope s(ctx);
    return build_manifold_pair(builtin_family("henon13"), Real("0.3"), ctx);
  }();
  return mp;
}

void BM_Normalize(benchmark::State& st) {
  PrecisionContext ctx = PrecisionContext::make(100);
  ContextScope s(ctx);
  PolyMapFamily f = builtin_family("henon13");
  for (auto _ : st) benchmark::DoNotOptimize(normalize(f, static_cast<int>(st.range(0)), ctx));
}
BENCHMARK(BM_Normalize)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_BuildPair(benchmark::State& st) {
  PrecisionContext ctx = PrecisionContext::make(PrecisionContext::digits_for_epsilon(0.3));
  ContextScope s(ctx);
  PolyMapFamily f = builtin_family("henon13");
  for (auto _ : st) benchmark::DoNotOptimize(build_manifold_pair(f, Real("0.3"), ctx));
}
BENCHMARK(BM_BuildPair)->Unit(benchmark::kMillisecond);

void BM_SplittingFunction(benchmark::State& st) {
  const ManifoldPair& mp = pair_at_03();
  ContextScope s(PrecisionContext::make(PrecisionContext::digits_for_epsilon(0.3)));
  Complex tau(Real("0.17"), Real(1));
  for (auto _ : st) benchmark::DoNotOptimize(splitting_function(mp, tau));
}
BENCHMARK(BM_SplittingFunction)->Unit(benchmark::kMicrosecond);

// Fourier coefficient with 1..n OpenMP threads.
void BM_FourierTheta(benchmark::State& st) {
  const ManifoldPair& mp = pair_at_03();
  ContextScope s(PrecisionContext::make(PrecisionContext::digits_for_epsilon(0.3)));
  omp_set_num_threads(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(fourier_theta(mp, Real(4), 64));
}
BENCHMARK(BM_FourierTheta)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "sipmix/analysis.hpp"
#include "sipmix/ensemble.hpp"
#include "sipmix/mixture.hpp"
#include "sipmix/rng.hpp"
#include "sipmix/sampler.hpp"
#include "sipmix/selberg.hpp"

using namespace sipmix;

static void BM_SdirTridiagonal(benchmark::State& state) {
  Rng rng(1);
  const SdirParams p{1.0, 1.0, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(sample_sdir(p, 1000, rng));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SdirTridiagonal)->Arg(3)->Arg(10)->Arg(30);

static void BM_SdirIndependenceMh(benchmark::State& state) {
  Rng rng(1);
  const SdirParams p{1.0, 1.0, static_cast<int>(state.range(0))};
  const SdirSamplingOptions opt{SdirSampler::IndependenceMH, 1000, 5};
  for (auto _ : state) benchmark::DoNotOptimize(sample_sdir(p, 1000, rng, opt));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SdirIndependenceMh)->Arg(3)->Arg(10);

static void BM_GeSample(benchmark::State& state) {
  Rng rng(1);
  const GeParams p{0.5, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(sample_ge(p, 1000, rng));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_GeSample)->Arg(5)->Arg(20);

static void BM_Sweep(benchmark::State& state) {
  const Dataset data = simulate_benchmark(1).data;
  Hyperparams h;
  h.gamma = 1.0;
  h.zeta = 0.1;
  h = h.resolved(data.dim());
  Rng rng(1);
  MixtureState s = initial_state(data, h, rng);
  const StepSizes steps{h.step_mu, h.step_gamma, h.step_gamma};
  StepDiagnostics diag;
  for (auto _ : state) sweep(data, s, h, steps, rng, diag);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMicrosecond);

static void BM_PosteriorSimilarity(benchmark::State& state) {
  Rng rng(1);
  const int n = static_cast<int>(state.range(0));
  PosteriorTrace tr;
  for (int t = 0; t < 1000; ++t) {
    TraceSample s;
    s.m = 6;
    for (int i = 0; i < n; ++i) s.alloc.push_back(rng.uniform_int(6));
    s.m_a = count_allocated(s.alloc);
    tr.samples.push_back(std::move(s));
  }
  for (auto _ : state) benchmark::DoNotOptimize(posterior_similarity(tr));
}
BENCHMARK(BM_PosteriorSimilarity)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_BinderEstimate(benchmark::State& state) {
  Rng rng(2);
  PosteriorTrace tr;
  for (int t = 0; t < 1000; ++t) {
    TraceSample s;
    s.m = 4;
    for (int i = 0; i < 300; ++i) s.alloc.push_back(rng.uniform_int(4));
    s.m_a = count_allocated(s.alloc);
    tr.samples.push_back(std::move(s));
  }
  const auto psm = posterior_similarity(tr);
  for (auto _ : state) benchmark::DoNotOptimize(binder_estimate(tr, psm));
}
BENCHMARK(BM_BinderEstimate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

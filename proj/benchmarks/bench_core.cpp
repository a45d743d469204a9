#include <benchmark/benchmark.h>

#include <vector>

#include "bprec/environment.hpp"
#include "bprec/normal.hpp"
#include "bprec/rng.hpp"
#include "bprec/simulate.hpp"
#include "bprec/verify.hpp"

using namespace bprec;

namespace {

void BM_NormalDraw(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.next_normal());
  }
}
BENCHMARK(BM_NormalDraw);

void BM_PhiQuantile(benchmark::State& state) {
  double p = 0.0001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi_quantile(p));
    p += 1e-7;
  }
}
BENCHMARK(BM_PhiQuantile);

void BM_Binomial(benchmark::State& state) {
  Rng rng(2);
  const std::uint64_t n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_binomial(rng, n, 0.4));
  }
}
BENCHMARK(BM_Binomial)->Arg(16)->Arg(1024)->Arg(1'000'000)->Arg(1'000'000'000);

void BM_Poisson(benchmark::State& state) {
  Rng rng(3);
  const double mu = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_poisson(rng, mu));
  }
}
BENCHMARK(BM_Poisson)->Arg(4)->Arg(64)->Arg(65536)->Arg(1'000'000'000);

void BM_NegativeBinomial(benchmark::State& state) {
  Rng rng(4);
  const std::uint64_t r = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_negative_binomial(rng, r, 0.5));
  }
}
BENCHMARK(BM_NegativeBinomial)->Arg(16)->Arg(1024)->Arg(1'000'000);

void BM_PairedGeneration(benchmark::State& state) {
  SimConfig cfg;
  cfg.family1 = EnvironmentFamily::make(FamilyKind::TwoPoint, 0.0, 1.0);
  cfg.family2 = cfg.family1;
  cfg.latent_r = 0.5;
  cfg.n = state.range(0);
  cfg.m = state.range(0);
  cfg.master_seed = 5;
  std::uint64_t rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_pair(cfg, rep++, /*keep_paths=*/false));
  }
  state.SetItemsProcessed(state.iterations() * 2 * cfg.n);
}
BENCHMARK(BM_PairedGeneration)->Arg(100)->Arg(2000);

void BM_KsDistance(benchmark::State& state) {
  const auto samples =
      inject_normal_samples(static_cast<std::uint64_t>(state.range(0)), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ks_distance(samples));
  }
  state.SetItemsProcessed(state.iterations() * samples.size());
}
BENCHMARK(BM_KsDistance)->Arg(100'000)->Arg(1'000'000);

void BM_Wasserstein(benchmark::State& state) {
  const auto samples =
      inject_normal_samples(static_cast<std::uint64_t>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wasserstein1(samples));
  }
  state.SetItemsProcessed(state.iterations() * samples.size());
}
BENCHMARK(BM_Wasserstein)->Arg(100'000)->Arg(1'000'000);

}  // namespace

BENCHMARK_MAIN();

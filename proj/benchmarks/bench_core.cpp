#include <benchmark/benchmark.h>

#include "signmat/chebyshev.hpp"
#include "signmat/l1_section.hpp"
#include "signmat/rng.hpp"
#include "signmat/sign_matrix.hpp"
#include "signmat/spectral.hpp"

namespace {

using namespace signmat;

void BM_GenSignMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto x = gen_sign_matrix(n / 2, n, seed++);
    benchmark::DoNotOptimize(x.entries.data());
  }
  state.SetItemsProcessed(state.iterations() * (n / 2) * int64_t{n});
}
BENCHMARK(BM_GenSignMatrix)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Covariance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto x = gen_sign_matrix(n / 2, n, 7);
  for (auto _ : state) {
    auto s = covariance(x);
    benchmark::DoNotOptimize(s.data().data());
  }
}
BENCHMARK(BM_Covariance)->Arg(256)->Arg(1024)->Arg(2048);

void BM_Eigenvalues(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto s = covariance(gen_sign_matrix(n / 2, n, 7));
  for (auto _ : state) {
    auto values = symmetric_eigenvalues(s);
    benchmark::DoNotOptimize(values.data());
  }
}
BENCHMARK(BM_Eigenvalues)->Arg(128)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_MpCdf(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mp_cdf(x, 0.5, steps));
    x += 1e-9;
  }
}
BENCHMARK(BM_MpCdf)->Arg(256)->Arg(4096);

void BM_TSequenceMatrix(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto x = gen_sign_matrix(p, 2 * p, 11);
  for (auto _ : state) {
    auto seq = t_sequence(x, 20);
    benchmark::DoNotOptimize(seq.normalized.data());
  }
}
BENCHMARK(BM_TSequenceMatrix)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_TSequenceSpectral(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const auto x = gen_sign_matrix(p, 2 * p, 11);
  for (auto _ : state) {
    auto seq = t_sequence_spectral(x, 20);
    benchmark::DoNotOptimize(seq.normalized.data());
  }
}
BENCHMARK(BM_TSequenceSpectral)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_KhinchineValue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sys = gen_sign_system(n, 0.5, 3);
  Xoshiro256ss rng(5);
  const auto x = random_unit_vector(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(khinchine_value(x, sys));
}
BENCHMARK(BM_KhinchineValue)->Arg(128)->Arg(512);

void BM_MinKhinchine(benchmark::State& state) {
  const auto sys = gen_sign_system(64, 0.5, 3);
  for (auto _ : state) {
    auto cert = min_khinchine(sys, 4, 50, 9);
    benchmark::DoNotOptimize(cert.min_estimate);
  }
}
BENCHMARK(BM_MinKhinchine)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

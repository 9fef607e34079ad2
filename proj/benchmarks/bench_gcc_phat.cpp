#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "egodoa/acoustics.hpp"
#include "egodoa/gcc_phat.hpp"
#include "egodoa/stft.hpp"

namespace {

std::vector<double> white(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

void BM_Stft(benchmark::State& state) {
  const auto wave = white(1, 8000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(egodoa::stft(wave, 1024, 320, 16000.0));
  }
}
BENCHMARK(BM_Stft);

void BM_GccPhat(benchmark::State& state) {
  const auto s1 = egodoa::stft(white(2, 8000), 1024, 320, 16000.0);
  const auto s2 = egodoa::stft(white(3, 8000), 1024, 320, 16000.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(egodoa::gcc_phat(s1, s2, 96));
  }
}
BENCHMARK(BM_GccPhat);

void BM_SrpPhatDoa(benchmark::State& state) {
  const auto s1 = egodoa::stft(white(4, 8000), 1024, 320, 16000.0);
  const auto s2 = egodoa::stft(white(5, 8000), 1024, 320, 16000.0);
  const auto feat = egodoa::gcc_phat(s1, s2, 96);
  const egodoa::AcousticsConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(egodoa::srp_phat_doa(feat, cfg));
  }
}
BENCHMARK(BM_SrpPhatDoa);

}  // namespace

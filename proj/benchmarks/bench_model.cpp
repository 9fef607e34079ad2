#include <benchmark/benchmark.h>

#include <random>

#include "egodoa/model.hpp"

namespace {

using namespace egodoa;

Eigen::MatrixXd randn(int r, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = dist(rng);
  }
  return m;
}

ModelConfig desk_model() {
  ModelConfig cfg;
  cfg.depth = 1;
  cfg.heads = 4;
  cfg.hidden = 64;
  cfg.ff = 128;
  cfg.audio_len = 22;
  cfg.visual_len = 196;
  cfg.audio_dim = 96;
  cfg.visual_dim = 768;
  cfg.seed = 1;
  return cfg;
}

TrainChunk make_chunk(const ModelConfig& cfg, bool in_fov) {
  TrainChunk chunk;
  chunk.gcc = randn(cfg.audio_len, cfg.audio_dim, 2);
  chunk.patches = randn(cfg.visual_len, cfg.visual_dim, 3);
  chunk.target = gaussian_target(90, 4.0).p;
  chunk.in_fov = in_fov;
  return chunk;
}

void BM_FusedForward(benchmark::State& state) {
  const auto cfg = desk_model();
  auto params = init_params(cfg);
  const auto chunk = make_chunk(cfg, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_posterior(chunk, cfg, params, true));
  }
}
BENCHMARK(BM_FusedForward);

void BM_AudioOnlyForward(benchmark::State& state) {
  const auto cfg = desk_model();
  auto params = init_params(cfg);
  const auto chunk = make_chunk(cfg, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_posterior(chunk, cfg, params, false));
  }
}
BENCHMARK(BM_AudioOnlyForward);

void BM_TrainStep(benchmark::State& state) {
  const auto cfg = desk_model();
  auto params = init_params(cfg);
  SgdOptimizer opt;
  opt.lr = 1e-3;
  std::vector<TrainChunk> batch;
  for (int i = 0; i < 4; ++i) batch.push_back(make_chunk(cfg, i % 2 == 0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_step_separate(batch, params, cfg, opt));
  }
}
BENCHMARK(BM_TrainStep);

}  // namespace

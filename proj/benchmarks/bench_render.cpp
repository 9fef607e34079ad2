#include <benchmark/benchmark.h>

#include "egodoa/acoustics.hpp"
#include "egodoa/frame_render.hpp"
#include "egodoa/trajectory.hpp"

namespace {

using namespace egodoa;

void BM_RenderFrame(benchmark::State& state) {
  const CameraIntrinsics cam;
  const Pose wearer{0, 1.6, 0, 0};
  const Pose speaker{0.4, 1.6, 2.0, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_frame(wearer, speaker, cam, 7));
  }
}
BENCHMARK(BM_RenderFrame);

void BM_RenderBinauralSecond(benchmark::State& state) {
  const AcousticsConfig cfg;
  Trajectory wearer, speaker;
  wearer.tick_rate_hz = speaker.tick_rate_hz = 50.0;
  for (double t = 0.0; t <= 1.0 + 1e-9; t += 0.02) {
    wearer.samples.push_back({t, Pose{0, 1.6, 0, 0}});
    speaker.samples.push_back({t, Pose{0.5 * t, 1.6, 2.0, 0}});
  }
  const auto src = make_noise(1, static_cast<int>(cfg.sample_rate) + 1, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_binaural(wearer, speaker, src, cfg));
  }
}
BENCHMARK(BM_RenderBinauralSecond);

void BM_GenTrajectory(benchmark::State& state) {
  TrajectoryParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_trajectory(42, params));
  }
}
BENCHMARK(BM_GenTrajectory);

}  // namespace

#ifndef EGODOA_PIPELINE_HPP_
#define EGODOA_PIPELINE_HPP_

#include <filesystem>
#include <vector>

#include "egodoa/config.hpp"
#include "egodoa/dataset.hpp"
#include "egodoa/feature_cache.hpp"
#include "egodoa/metrics.hpp"

namespace egodoa {

// Scene specs implied by a run configuration: seeds derived from the
// global seed, splits assigned per scene (never per chunk).
std::vector<SceneSpec> plan_scenes(const RunConfig& cfg);

struct SimulateSummary {
  int scenes = 0;
  int chunks = 0;
  double in_fov_fraction = 0.0;
};

SimulateSummary run_simulate(const RunConfig& cfg);

struct FeaturizeSummary {
  int total = 0;
  int computed = 0;
  int reused = 0;
};

FeaturizeSummary run_featurize(const RunConfig& cfg);

struct TrainSummary {
  int epochs_run = 0;
  double first_train_loss = 0.0;
  double final_train_loss = 0.0;
  double best_val_ae = 0.0;
  int best_epoch = 0;
  std::filesystem::path best_checkpoint;
};

TrainSummary run_train(const RunConfig& cfg);

struct EvaluateSummary {
  EvalReport model;
  EvalReport audio_only;
  EvalReport srp;
  int test_chunks = 0;
};

EvaluateSummary run_evaluate(const RunConfig& cfg);

void run_report(const RunConfig& cfg);

}  // namespace egodoa

#endif  // EGODOA_PIPELINE_HPP_

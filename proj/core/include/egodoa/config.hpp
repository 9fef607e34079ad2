#ifndef EGODOA_CONFIG_HPP_
#define EGODOA_CONFIG_HPP_

#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "egodoa/dataset.hpp"
#include "egodoa/feature_cache.hpp"
#include "egodoa/model.hpp"

namespace egodoa {

// Invalid or contradictory configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A required input artifact is absent (CLI exit code 3).
struct MissingArtifactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training or evaluation produced non-finite numbers (CLI exit code 4).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // global
  std::string preset = "desk";  // "desk" or "paper"
  std::uint64_t seed = 7;
  int workers = 1;
  std::filesystem::path out_root = "out";

  // simulate
  int scenes = 8;
  double duration_s = 10.0;
  double snr_db = std::numeric_limits<double>::infinity();
  bool pink_noise = false;
  double train_frac = 0.70;
  double val_frac = 0.15;
  TrajectoryParams trajectory;
  AcousticsConfig acoustics;
  CameraIntrinsics camera;

  // featurize
  FeaturizeConfig features;

  // train
  ModelConfig model;
  int epochs = 30;
  int batch = 64;
  double lr = 5e-3;
  double momentum = 0.9;
  double sigma = 4.0;
  int patience = 30;

  // eval
  bool baseline_srp = true;
  bool baseline_audio_only = true;

  std::filesystem::path dataset_dir() const { return out_root / "dataset"; }
  std::filesystem::path features_dir() const { return out_root / "features"; }
  std::filesystem::path train_dir() const { return out_root / "train"; }
  std::filesystem::path eval_dir() const { return out_root / "eval"; }
  std::filesystem::path report_dir() const { return out_root / "report"; }
};

// Built-in presets. "desk" is the small fast configuration; "paper"
// encodes the published hyperparameters verbatim.
RunConfig preset_config(const std::string& name);

// Loads TOML (a flat [section] key=value subset) or JSON (detected by a
// leading '{') over the given base config. Unknown sections or keys are
// a ConfigError.
RunConfig load_config_file(const std::filesystem::path& path,
                           const RunConfig& base);

// The effective configuration as canonical JSON, written next to outputs
// for provenance.
std::string config_to_json(const RunConfig& cfg);

}  // namespace egodoa

#endif  // EGODOA_CONFIG_HPP_

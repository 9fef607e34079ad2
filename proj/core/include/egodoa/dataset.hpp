#ifndef EGODOA_DATASET_HPP_
#define EGODOA_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "egodoa/acoustics.hpp"
#include "egodoa/geometry.hpp"
#include "egodoa/trajectory.hpp"

namespace egodoa {

struct SceneSpec {
  int scene_id = 0;
  std::uint64_t seed = 0;
  std::string split = "train";
  TrajectoryParams trajectory;
  AcousticsConfig acoustics;
  CameraIntrinsics camera;
  double fps = 50.0;
  int chunk_every_frames = 2;
  int clip_frames = 25;  // audio clip length, in video frames
  double snr_db = std::numeric_limits<double>::infinity();
  bool pink_noise = false;
};

// One manifest row. Paths are relative to the dataset root.
struct ChunkRecord {
  int scene_id = 0;
  int chunk_idx = 0;
  std::string split;
  double t_s = 0.0;           // frame timestamp
  double clip_start_s = 0.0;  // audio clip start (clamped to the scene)
  Pose wearer;
  Pose speaker;
  double azimuth_deg = 0.0;
  int azimuth_bin = 0;  // integer degree in [0, 360)
  bool in_fov = false;
  bool wearer_speaking = false;
  bool snr_defined = true;
  std::string wav_path;
  std::string png_path;
};

struct DatasetManifest {
  std::vector<ChunkRecord> rows;

  double in_fov_fraction() const;
};

// Chunk annotations for a scene without rendering any audio or pixels.
// Used for dataset-balance checks and internally by write_dataset.
std::vector<ChunkRecord> annotate_scene(const SceneSpec& scene);

// Wearer self-speech on/off segments, seeded; returns (start_s, end_s) pairs.
std::vector<std::pair<double, double>> wearer_speech_schedule(
    std::uint64_t seed, double duration_s);

// Renders every scene to out_dir (scene_SSSS/chunk_CCCCCC.{wav,png}) and
// writes manifest.jsonl at the root, one JSON object per chunk.
// Throws std::runtime_error with path context on I/O failure.
DatasetManifest write_dataset(const std::vector<SceneSpec>& scenes,
                              const std::filesystem::path& out_dir);

DatasetManifest read_manifest(const std::filesystem::path& manifest_path);

}  // namespace egodoa

#endif  // EGODOA_DATASET_HPP_

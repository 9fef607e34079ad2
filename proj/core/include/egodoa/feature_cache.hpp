#ifndef EGODOA_FEATURE_CACHE_HPP_
#define EGODOA_FEATURE_CACHE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace egodoa {

struct FeaturizeConfig {
  int window = 1024;
  int hop = 320;
  int n_lags = 96;
  int patch = 16;
  double sample_rate = 16000.0;
};

// Hex digest over every field; written into cache headers so a config
// change invalidates stale caches.
std::string feature_config_hash(const FeaturizeConfig& cfg);

// One chunk's extracted features. Patches are kept as the raw 8-bit
// intensities (row-major, one patch per row) to bound memory; divide by
// 255 to recover the model's [0, 1] input.
struct ChunkFeatures {
  Eigen::MatrixXd gcc;  // L_a x n_lags
  std::vector<std::uint8_t> patches_u8;
  int patch_rows = 0;
  int patch_cols = 0;

  Eigen::MatrixXd patches() const;  // scaled to [0, 1]
};

// Binary cache file: magic, JSON header (shapes, dtypes, lag convention,
// config hash), then the gcc matrix as float32 and the patches as uint8.
void write_chunk_features(const std::filesystem::path& path,
                          const ChunkFeatures& feat,
                          const std::string& config_hash);

// Throws std::runtime_error on malformed files or a hash mismatch.
ChunkFeatures read_chunk_features(const std::filesystem::path& path,
                                  const std::string& expected_hash);

// True when the file exists and its header hash matches (reusable as-is).
bool chunk_features_valid(const std::filesystem::path& path,
                          const std::string& expected_hash);

}  // namespace egodoa

#endif  // EGODOA_FEATURE_CACHE_HPP_

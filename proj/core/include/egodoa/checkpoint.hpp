#ifndef EGODOA_CHECKPOINT_HPP_
#define EGODOA_CHECKPOINT_HPP_

#include <filesystem>

#include "egodoa/model.hpp"

namespace egodoa {

// Versioned binary checkpoint: config header followed by named tensors.
// Round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg,
                     const ParameterStore& params);

struct Checkpoint {
  ModelConfig config;
  ParameterStore params;
};

// Throws std::runtime_error on a missing file or malformed header.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace egodoa

#endif  // EGODOA_CHECKPOINT_HPP_

#ifndef EGODOA_AUDIO_IO_HPP_
#define EGODOA_AUDIO_IO_HPP_

#include <filesystem>

#include "egodoa/acoustics.hpp"

namespace egodoa {

// 2-channel 32-bit float PCM WAV.
void write_wav(const std::filesystem::path& path, const StereoBuffer& audio);
StereoBuffer read_wav(const std::filesystem::path& path);

}  // namespace egodoa

#endif  // EGODOA_AUDIO_IO_HPP_

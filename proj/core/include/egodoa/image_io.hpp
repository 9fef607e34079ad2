#ifndef EGODOA_IMAGE_IO_HPP_
#define EGODOA_IMAGE_IO_HPP_

#include <filesystem>

#include "egodoa/patches.hpp"

namespace egodoa {

// 8-bit RGB PNG.
void write_png(const std::filesystem::path& path, const FrameImage& img);
FrameImage read_png(const std::filesystem::path& path);

}  // namespace egodoa

#endif  // EGODOA_IMAGE_IO_HPP_

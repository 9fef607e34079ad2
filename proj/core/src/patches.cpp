#include "egodoa/patches.hpp"

#include <cmath>
#include <stdexcept>

namespace egodoa {

PatchSequence patchify(const FrameImage& img, int r) {
  if (r <= 0 || img.height % r != 0 || img.width % r != 0) {
    throw std::invalid_argument("patchify: dimensions not divisible by r");
  }
  const int rows = img.height / r;
  const int cols = img.width / r;

  PatchSequence out;
  out.patch_size = r;
  out.data.resize(rows * cols, 3 * r * r);

  for (int py = 0; py < rows; ++py) {
    for (int px = 0; px < cols; ++px) {
      const int patch = py * cols + px;
      int k = 0;
      for (int y = 0; y < r; ++y) {
        for (int x = 0; x < r; ++x) {
          for (int c = 0; c < 3; ++c) {
            out.data(patch, k++) =
                img.at(py * r + y, px * r + x, c) / 255.0;
          }
        }
      }
    }
  }
  return out;
}

FrameImage unpatchify(const PatchSequence& patches, int height, int width) {
  const int r = patches.patch_size;
  if (r <= 0 || height % r != 0 || width % r != 0 ||
      patches.patches() != (height / r) * (width / r) ||
      patches.dims() != 3 * r * r) {
    throw std::invalid_argument("unpatchify: shape mismatch");
  }
  const int cols = width / r;

  FrameImage img;
  img.height = height;
  img.width = width;
  img.rgb.assign(static_cast<size_t>(height) * width * 3, 0);

  for (int patch = 0; patch < patches.patches(); ++patch) {
    const int py = patch / cols;
    const int px = patch % cols;
    int k = 0;
    for (int y = 0; y < r; ++y) {
      for (int x = 0; x < r; ++x) {
        for (int c = 0; c < 3; ++c) {
          img.at(py * r + y, px * r + x, c) = static_cast<std::uint8_t>(
              std::lround(patches.data(patch, k++) * 255.0));
        }
      }
    }
  }
  return img;
}

}  // namespace egodoa

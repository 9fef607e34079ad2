#ifndef EGODOA_PATCHES_HPP_
#define EGODOA_PATCHES_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace egodoa {

// H x W x 3 interleaved 8-bit RGB.
struct FrameImage {
  int height = 224;
  int width = 224;
  std::vector<std::uint8_t> rgb;  // size = height * width * 3

  std::uint8_t& at(int y, int x, int c) { return rgb[(y * width + x) * 3 + c]; }
  std::uint8_t at(int y, int x, int c) const {
    return rgb[(y * width + x) * 3 + c];
  }
};

// L_v patches x (3*r*r) values in [0, 1]; row-major patch order,
// channel-last flattening within a patch.
struct PatchSequence {
  Eigen::MatrixXd data;
  int patch_size = 16;

  int patches() const { return static_cast<int>(data.rows()); }
  int dims() const { return static_cast<int>(data.cols()); }
};

// Throws std::invalid_argument when H or W is not divisible by r.
PatchSequence patchify(const FrameImage& img, int r);

// Exact inverse of patchify (bit-exact for 8-bit inputs).
FrameImage unpatchify(const PatchSequence& patches, int height, int width);

}  // namespace egodoa

#endif  // EGODOA_PATCHES_HPP_

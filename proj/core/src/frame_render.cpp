#include "egodoa/frame_render.hpp"

#include <algorithm>
#include <cmath>

namespace egodoa {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double lattice(std::uint64_t seed, int ix, int iy) {
  const std::uint64_t h = splitmix64(
      seed ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) ^
      static_cast<std::uint32_t>(iy));
  return (h >> 11) * (1.0 / 9007199254740992.0);  // [0, 1)
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Value noise over (pan angle, image row) so the texture pans with yaw.
double background_noise(std::uint64_t seed, double angle_deg, double row,
                        double cell) {
  const double ax = angle_deg / cell;
  const double ay = row / cell;
  const int ix = static_cast<int>(std::floor(ax));
  const int iy = static_cast<int>(std::floor(ay));
  const double fx = smoothstep(ax - ix);
  const double fy = smoothstep(ay - iy);
  const double v00 = lattice(seed, ix, iy), v10 = lattice(seed, ix + 1, iy);
  const double v01 = lattice(seed, ix, iy + 1),
               v11 = lattice(seed, ix + 1, iy + 1);
  return (v00 * (1 - fx) + v10 * fx) * (1 - fy) +
         (v01 * (1 - fx) + v11 * fx) * fy;
}

}  // namespace

FrameImage render_frame(const Pose& wearer, const Pose& speaker,
                        const CameraIntrinsics& cam, std::uint64_t seed) {
  FrameImage img;
  img.width = cam.image_width;
  img.height = cam.image_height;
  img.rgb.resize(static_cast<size_t>(img.width) * img.height * 3);

  const double ppd = cam.image_width / cam.horizontal_fov_deg;

  for (int y = 0; y < img.height; ++y) {
    const double horizon = 1.0 - static_cast<double>(y) / img.height;
    for (int x = 0; x < img.width; ++x) {
      const double angle =
          wearer.yaw_deg + (x - cam.image_width / 2.0) / ppd;
      const double coarse = background_noise(seed, angle, y * 0.12, 8.0);
      const double fine = background_noise(seed ^ 0xabcdULL, angle * 3.0,
                                           y * 0.5, 5.0);
      const double shade = 0.45 + 0.35 * horizon + 0.15 * coarse + 0.05 * fine;
      img.at(y, x, 0) = static_cast<std::uint8_t>(
          std::clamp(shade * 220.0, 0.0, 255.0));
      img.at(y, x, 1) = static_cast<std::uint8_t>(
          std::clamp(shade * 205.0, 0.0, 255.0));
      img.at(y, x, 2) = static_cast<std::uint8_t>(
          std::clamp(shade * 185.0, 0.0, 255.0));
    }
  }

  const auto pix = project_pinhole(wearer, speaker, cam);
  if (!pix) return img;

  const HeadingBasis b = heading_basis(wearer.yaw_deg);
  const double depth = (speaker.x - wearer.x) * b.fwd_x +
                       (speaker.z - wearer.z) * b.fwd_z;
  const double half_fov = cam.horizontal_fov_deg * 3.14159265358979323846 /
                          360.0;
  const double fy = (cam.image_width / 2.0) / std::tan(half_fov);
  const double body_px = fy * 1.7 / std::max(depth, 0.3);

  const double head_r = body_px * 0.09;
  const double torso_cx = pix->u;
  const double torso_cy = pix->v + body_px * 0.30;
  const double torso_rx = body_px * 0.17;
  const double torso_ry = body_px * 0.28;

  const int x0 = std::max(0, static_cast<int>(torso_cx - torso_rx - head_r));
  const int x1 = std::min(img.width - 1,
                          static_cast<int>(torso_cx + torso_rx + head_r));
  const int y0 = std::max(0, static_cast<int>(pix->v - head_r * 1.5));
  const int y1 = std::min(img.height - 1,
                          static_cast<int>(torso_cy + torso_ry + 1));

  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double du = x - pix->u;
      const double dv = y - pix->v;
      const bool in_head = du * du + dv * dv <= head_r * head_r;
      const double tu = (x - torso_cx) / torso_rx;
      const double tv = (y - torso_cy) / torso_ry;
      const bool in_torso = tu * tu + tv * tv <= 1.0;
      if (in_head || in_torso) {
        img.at(y, x, 0) = 38;
        img.at(y, x, 1) = 32;
        img.at(y, x, 2) = 48;
      }
    }
  }
  return img;
}

}  // namespace egodoa

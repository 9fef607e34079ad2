#include "egodoa/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace egodoa {

namespace {
constexpr double kPi = 3.14159265358979323846;
double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }
}  // namespace

HeadingBasis heading_basis(double yaw_deg) {
  const double r = deg2rad(yaw_deg);
  return HeadingBasis{std::sin(r), std::cos(r), std::cos(r), -std::sin(r)};
}

double wrap_deg(double angle_deg) {
  double a = std::fmod(angle_deg, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a = 0.0;  // fmod can land exactly on 360 after the add
  return a;
}

double cyclic_abs_error(double theta_deg, double theta_hat_deg) {
  double d = std::fabs(wrap_deg(theta_deg) - wrap_deg(theta_hat_deg));
  return d > 180.0 ? 360.0 - d : d;
}

AzimuthDeg relative_doa(const Pose& wearer, const Pose& speaker) {
  if (!std::isfinite(wearer.x) || !std::isfinite(wearer.z) ||
      !std::isfinite(speaker.x) || !std::isfinite(speaker.z) ||
      !std::isfinite(wearer.yaw_deg)) {
    throw std::invalid_argument("relative_doa: non-finite pose");
  }
  const double dx = speaker.x - wearer.x;
  const double dz = speaker.z - wearer.z;
  if (dx == 0.0 && dz == 0.0) {
    throw std::invalid_argument(
        "relative_doa: wearer and speaker share the same horizontal position");
  }
  const HeadingBasis b = heading_basis(wearer.yaw_deg);
  const double fwd = dx * b.fwd_x + dz * b.fwd_z;
  const double right = dx * b.right_x + dz * b.right_z;
  return AzimuthDeg{wrap_deg(rad2deg(std::atan2(fwd, right)))};
}

bool in_fov(AzimuthDeg az) { return az.deg >= 60.0 && az.deg <= 120.0; }

std::optional<Pixel> project_pinhole(const Pose& wearer, const Pose& speaker,
                                     const CameraIntrinsics& cam) {
  const HeadingBasis b = heading_basis(wearer.yaw_deg);
  const double dx = speaker.x - wearer.x;
  const double dz = speaker.z - wearer.z;
  const double depth = dx * b.fwd_x + dz * b.fwd_z;
  const double lateral = dx * b.right_x + dz * b.right_z;
  if (depth <= 0.0) return std::nullopt;

  const double half_fov = deg2rad(cam.horizontal_fov_deg / 2.0);
  const double angle = std::atan2(lateral, depth);
  if (std::fabs(angle) > half_fov) return std::nullopt;

  // fx from the horizontal FOV; square pixels, so fy = fx.
  const double fx = (cam.image_width / 2.0) / std::tan(half_fov);
  const double u = cam.image_width / 2.0 + fx * (lateral / depth);
  const double v =
      cam.image_height / 2.0 - fx * ((speaker.y - wearer.y) / depth);
  return Pixel{u, v};
}

double doppler_shift(double f_hz, double v_r, double v_s, double c) {
  if (v_s >= c) {
    throw std::invalid_argument("doppler_shift: source velocity >= sound speed");
  }
  return f_hz * (c + v_r) / (c - v_s);
}

double great_circle_deg(const SpherePoint& a, const SpherePoint& b) {
  const double az1 = deg2rad(a.azimuth_deg), el1 = deg2rad(a.elevation_deg);
  const double az2 = deg2rad(b.azimuth_deg), el2 = deg2rad(b.elevation_deg);
  const double x1 = std::cos(el1) * std::cos(az1), y1 = std::cos(el1) * std::sin(az1),
               z1 = std::sin(el1);
  const double x2 = std::cos(el2) * std::cos(az2), y2 = std::cos(el2) * std::sin(az2),
               z2 = std::sin(el2);
  const double dot = x1 * x2 + y1 * y2 + z1 * z2;
  const double cx = y1 * z2 - z1 * y2;
  const double cy = z1 * x2 - x1 * z2;
  const double cz = x1 * y2 - y1 * x2;
  const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
  return rad2deg(std::atan2(cross, dot));
}

}  // namespace egodoa

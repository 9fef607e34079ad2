#ifndef EGODOA_GEOMETRY_HPP_
#define EGODOA_GEOMETRY_HPP_

#include <optional>

namespace egodoa {

// Position in meters plus yaw in degrees, normalized to [0, 360).
// Yaw 0 faces +z; increasing yaw turns the facing direction towards +x.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw_deg = 0.0;
};

// Wearer-relative azimuth in [0, 360).
// 90 = straight ahead, 0 = wearer's right, 180 = left, 270 = behind.
struct AzimuthDeg {
  double deg = 0.0;
};

struct CameraIntrinsics {
  double horizontal_fov_deg = 60.0;
  int image_width = 224;
  int image_height = 224;
};

struct SpherePoint {
  double azimuth_deg = 0.0;    // [0, 360)
  double elevation_deg = 0.0;  // [-90, 90]
};

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

// Wearer-frame basis vectors in the horizontal (x, z) plane.
// forward = (sin yaw, cos yaw), right = (cos yaw, -sin yaw).
struct HeadingBasis {
  double fwd_x, fwd_z;
  double right_x, right_z;
};

HeadingBasis heading_basis(double yaw_deg);

// Reduce any finite angle to [0, 360).
double wrap_deg(double angle_deg);

// Cyclic absolute error in [0, 180], symmetric in its arguments.
double cyclic_abs_error(double theta_deg, double theta_hat_deg);

// Azimuth of the speaker in the wearer frame.
// Throws std::invalid_argument on coincident horizontal positions or
// non-finite poses.
AzimuthDeg relative_doa(const Pose& wearer, const Pose& speaker);

// True iff the azimuth lies in the camera's horizontal coverage
// [60, 120], bounds inclusive.
bool in_fov(AzimuthDeg az);

// Pinhole projection of the speaker's head center. Empty when the
// speaker is behind the camera or outside the horizontal FOV.
std::optional<Pixel> project_pinhole(const Pose& wearer, const Pose& speaker,
                                     const CameraIntrinsics& cam);

// Received frequency for receiver velocity v_r and source velocity v_s
// (both along the line of approach, positive = closing).
// Throws std::invalid_argument when v_s >= c.
double doppler_shift(double f_hz, double v_r, double v_s, double c);

// Central angle between two sphere points, in [0, 180] degrees.
double great_circle_deg(const SpherePoint& a, const SpherePoint& b);

}  // namespace egodoa

#endif  // EGODOA_GEOMETRY_HPP_

#ifndef EGODOA_TRAJECTORY_HPP_
#define EGODOA_TRAJECTORY_HPP_

#include <cstdint>
#include <vector>

#include "egodoa/geometry.hpp"

namespace egodoa {

struct RoomBounds {
  double x_min = 0.0, x_max = 6.0;
  double z_min = 0.0, z_max = 8.0;
};

struct TrajectoryParams {
  RoomBounds room;
  double speed_min = 0.5;   // m/s
  double speed_max = 1.5;   // m/s
  double period_min_s = 2.0;
  double period_max_s = 4.0;
  double stop_probability = 0.5;
  double duration_s = 10.0;
  double tick_rate_hz = 50.0;
  double height_m = 1.6;  // fixed y for the head center
};

struct TimedPose {
  double t_s = 0.0;
  Pose pose;
};

struct Trajectory {
  std::vector<TimedPose> samples;
  double tick_rate_hz = 50.0;

  // Linear position interpolation, shortest-arc yaw interpolation,
  // clamped at the ends.
  Pose at(double t_s) const;
  double duration_s() const;
};

// Seeded random walk: at each period boundary stand still with the stop
// probability, otherwise pick a uniform heading and speed; headings
// reflect at the walls. Yaw follows the heading while moving and holds
// while stopped. Throws std::invalid_argument on a degenerate room.
Trajectory gen_trajectory(std::uint64_t seed, const TrajectoryParams& params);

}  // namespace egodoa

#endif  // EGODOA_TRAJECTORY_HPP_

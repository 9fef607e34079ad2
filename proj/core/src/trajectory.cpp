#include "egodoa/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace egodoa {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Pose Trajectory::at(double t_s) const {
  if (samples.empty()) throw std::logic_error("Trajectory::at: empty");
  if (t_s <= samples.front().t_s) return samples.front().pose;
  if (t_s >= samples.back().t_s) return samples.back().pose;

  const double dt = 1.0 / tick_rate_hz;
  const size_t i = std::min(
      static_cast<size_t>((t_s - samples.front().t_s) / dt),
      samples.size() - 2);
  const TimedPose& a = samples[i];
  const TimedPose& b = samples[i + 1];
  const double w = std::clamp((t_s - a.t_s) / (b.t_s - a.t_s), 0.0, 1.0);

  Pose p;
  p.x = a.pose.x + w * (b.pose.x - a.pose.x);
  p.y = a.pose.y + w * (b.pose.y - a.pose.y);
  p.z = a.pose.z + w * (b.pose.z - a.pose.z);
  double dyaw = b.pose.yaw_deg - a.pose.yaw_deg;
  if (dyaw > 180.0) dyaw -= 360.0;
  if (dyaw < -180.0) dyaw += 360.0;
  p.yaw_deg = wrap_deg(a.pose.yaw_deg + w * dyaw);
  return p;
}

double Trajectory::duration_s() const {
  return samples.empty() ? 0.0 : samples.back().t_s - samples.front().t_s;
}

Trajectory gen_trajectory(std::uint64_t seed, const TrajectoryParams& params) {
  if (params.room.x_max <= params.room.x_min ||
      params.room.z_max <= params.room.z_min) {
    throw std::invalid_argument("gen_trajectory: degenerate room bounds");
  }
  if (params.speed_min <= 0.0 || params.speed_max > 10.0 ||
      params.speed_min > params.speed_max) {
    throw std::invalid_argument("gen_trajectory: speed range outside (0, 10]");
  }
  if (params.stop_probability < 0.0 || params.stop_probability > 1.0) {
    throw std::invalid_argument("gen_trajectory: stop probability outside [0, 1]");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double margin = 0.2;
  auto rand_in = [&](double lo, double hi) {
    return lo + (hi - lo) * unit(rng);
  };

  double x = rand_in(params.room.x_min + margin, params.room.x_max - margin);
  double z = rand_in(params.room.z_min + margin, params.room.z_max - margin);
  double yaw = rand_in(0.0, 360.0);
  double heading = yaw;
  double speed = 0.0;
  bool moving = false;
  double next_decision_t = 0.0;

  const double dt = 1.0 / params.tick_rate_hz;
  const int ticks = static_cast<int>(std::round(params.duration_s *
                                                params.tick_rate_hz));

  Trajectory traj;
  traj.tick_rate_hz = params.tick_rate_hz;
  traj.samples.reserve(ticks + 1);

  for (int i = 0; i <= ticks; ++i) {
    const double t = i * dt;
    if (t >= next_decision_t) {
      next_decision_t = t + rand_in(params.period_min_s, params.period_max_s);
      if (unit(rng) < params.stop_probability) {
        moving = false;
        speed = 0.0;
      } else {
        moving = true;
        heading = rand_in(0.0, 360.0);
        speed = rand_in(params.speed_min, params.speed_max);
      }
    }

    traj.samples.push_back(
        TimedPose{t, Pose{x, params.height_m, z, wrap_deg(yaw)}});

    if (moving) {
      const double hr = heading * kPi / 180.0;
      double nx = x + std::sin(hr) * speed * dt;
      double nz = z + std::cos(hr) * speed * dt;
      // Reflect off the walls.
      if (nx < params.room.x_min + margin || nx > params.room.x_max - margin) {
        heading = wrap_deg(-heading);
        nx = x;
      }
      if (nz < params.room.z_min + margin || nz > params.room.z_max - margin) {
        heading = wrap_deg(180.0 - heading);
        nz = z;
      }
      x = std::clamp(nx, params.room.x_min, params.room.x_max);
      z = std::clamp(nz, params.room.z_min, params.room.z_max);
      yaw = heading;
    }
  }
  return traj;
}

}  // namespace egodoa

#ifndef EGODOA_FRAME_RENDER_HPP_
#define EGODOA_FRAME_RENDER_HPP_

#include <cstdint>

#include "egodoa/geometry.hpp"
#include "egodoa/patches.hpp"

namespace egodoa {

// Deterministic synthetic camera frame: a yaw-panning textured background
// plus a head-and-torso silhouette at the speaker's projection when the
// speaker is in view. Silhouette height scales as 1/distance.
FrameImage render_frame(const Pose& wearer, const Pose& speaker,
                        const CameraIntrinsics& cam, std::uint64_t seed);

}  // namespace egodoa

#endif  // EGODOA_FRAME_RENDER_HPP_

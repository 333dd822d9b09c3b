#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "xrsim/common/image.hpp"
#include "xrsim/visual/camera.hpp"

namespace xrsim {

struct RenderedFrame {
    ImageU8 image;  ///< RGB
    Pose render_pose;
    Timestamp submit_ts;
};

struct SceneBox {
    Vec3 min;
    Vec3 max;
    std::array<std::uint8_t, 3> color;
};

/// Seeded scene: a finite checkered floor and a ring of coloured boxes.
struct Scene {
    std::vector<SceneBox> boxes;
    double floor_half_extent = 12.0;  ///< m
    std::array<std::uint8_t, 3> background{40, 48, 64};

    static Scene generate(std::uint64_t seed);
};

/// Deterministic CPU raycast of the scene from `pose`.
RenderedFrame render_app(std::uint64_t scene_seed, const Pose& pose, const CameraModel& cam);
RenderedFrame render_scene(const Scene& scene, const Pose& pose, const CameraModel& cam);

}  // namespace xrsim

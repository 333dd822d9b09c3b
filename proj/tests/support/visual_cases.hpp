#pragma once

// Reprojection and hologram scenarios shared by the unit tests and the acceptance binary.

#include <numbers>

#include "xrsim/metrics/image_metrics.hpp"
#include "xrsim/perception/trajectory.hpp"
#include "xrsim/visual/hologram.hpp"
#include "xrsim/visual/render.hpp"
#include "xrsim/visual/reproject.hpp"

namespace support {

using namespace xrsim;

inline constexpr std::uint64_t kSceneSeed = 7;

// 2560x1440 at 1/8 scale, the session default
inline CameraModel small_camera() { return CameraModel::from_fov(320, 180, 90.0); }
// full display resolution; the reprojection criteria are judged here
inline CameraModel display_camera() { return CameraModel::from_fov(2560, 1440, 90.0); }

inline Pose viewing_pose() { return ground_truth_pose(TrajectorySpec{}, Timestamp::from_seconds(1.3)).pose; }

inline Pose yawed(const Pose& p, double deg) {
    Pose q = p;
    q.orientation = (Quat(Eigen::AngleAxisd(deg * std::numbers::pi / 180.0, Vec3::UnitZ())) * p.orientation).normalized();
    return q;
}

template <typename T>
Image<T> inset(const Image<T>& img, int border) {
    Image<T> out(img.width - 2 * border, img.height - 2 * border, img.channels);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = img.at(x + border, y + border, c);
    return out;
}

struct IdentityResult {
    double ssim;
    bool identical;
};

inline IdentityResult identity_reprojection(const CameraModel& cam = display_camera()) {
    const auto frame = render_app(kSceneSeed, viewing_pose(), cam);
    const auto out = reproject(frame, frame.render_pose, cam);
    const auto a = inset(frame.image, 1);
    const auto b = inset(out, 1);
    return {xrsim::ssim(a, b), a == b};
}

// timewarp a 2 degree yaw against a fresh render at the new pose
inline double yaw_reprojection_ssim(double deg = 2.0, const CameraModel& cam = display_camera()) {
    const auto frame = render_app(kSceneSeed, viewing_pose(), cam);
    const auto target = yawed(viewing_pose(), deg);
    const auto warped = reproject(frame, target, cam);
    const auto fresh = render_app(kSceneSeed, target, cam);
    return xrsim::ssim(center_crop(warped, 0.8), center_crop(fresh.image, 0.8));
}

inline double roundtrip_reprojection_ssim(double deg = 2.0, const CameraModel& cam = display_camera()) {
    const auto frame = render_app(kSceneSeed, viewing_pose(), cam);
    const auto target = yawed(viewing_pose(), deg);
    RenderedFrame there{reproject(frame, target, cam), target, frame.submit_ts};
    const auto back = reproject(there, frame.render_pose, cam);
    return xrsim::ssim(center_crop(frame.image, 0.8), center_crop(back, 0.8));
}

inline HologramProblem three_point_problem() {
    HologramProblem p;
    p.width = 64;
    p.height = 64;
    // millimetre separations: well outside the ~1 mm diffraction spot of a 0.5 mm mask,
    // inside the range where the Fresnel phase is still sampled without aliasing
    p.points = {{-2e-3, 1e-3, 0, 1.0}, {1.5e-3, -1.5e-3, 3, 0.8}, {0.5e-3, 2.5e-3, 7, 1.2}};
    return p;
}

}  // namespace support

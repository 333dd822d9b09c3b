#pragma once

#include <array>
#include <span>
#include <vector>

#include "xrsim/common/image.hpp"
#include "xrsim/perception/pose.hpp"
#include "xrsim/visual/camera.hpp"
#include "xrsim/visual/render.hpp"

namespace xrsim {

struct Prediction {
    Pose pose;
    bool fallback = false;  ///< too little history; latest pose returned as-is
};

/// Constant-acceleration extrapolation to `display_ts`.
///
/// Position: quadratic through the newest sample, least-squares over the
/// last `window` samples. Orientation: body rate and angular acceleration
/// from the two newest orientation deltas. Needs >= 3 samples with distinct
/// timestamps; otherwise falls back to the newest pose.
Prediction predict_pose(std::span<const PoseSample> history, Timestamp display_ts, std::size_t window = 5);

/// Output->source homography for a pure rotation from `render` to `predicted`.
Mat3 rotation_homography(const Quat& render, const Quat& predicted, const CameraModel& cam);

/// Rotational timewarp with bilinear sampling; sources off the image (or
/// behind the camera) become black.
ImageU8 reproject(const RenderedFrame& frame, const Pose& predicted, const CameraModel& cam);
ImageU8 warp_homography(const ImageU8& src, const Mat3& H);

struct RadialCoeffs {
    double k1 = 0.0;
    double k2 = 0.0;
};

/// Default chromatic set: red (0.22, 0.24), green 3% weaker, blue 3% stronger.
std::array<RadialCoeffs, 3> default_lens_coeffs();

/// Per-channel source coordinates sampled on a regular vertex grid spanning the image.
struct DistortionMesh {
    int image_width = 0;
    int image_height = 0;
    int grid_w = 0;
    int grid_h = 0;
    std::array<std::vector<Eigen::Vector2d>, 3> src;  ///< row-major grid_w*grid_h per channel

    const Eigen::Vector2d& at(int c, int gx, int gy) const { return src[c][gy * grid_w + gx]; }
    /// Bilinearly interpolated source coordinate for output pixel (x, y).
    Eigen::Vector2d lookup(int c, double x, double y) const;
};

/// r_src = r_dst (1 + k1 r_dst^2 + k2 r_dst^4), r in normalized (tangent) units.
DistortionMesh build_distortion_mesh(const CameraModel& cam, const std::array<RadialCoeffs, 3>& coeffs,
                                     int grid_w = 33, int grid_h = 33);
/// Mesh of the inverse mapping (Newton solve per vertex), for undoing a distortion.
DistortionMesh build_inverse_distortion_mesh(const CameraModel& cam, const std::array<RadialCoeffs, 3>& coeffs,
                                             int grid_w = 33, int grid_h = 33);

/// Each channel warped through its grid; samples clamp to the image edge.
/// Throws DimensionError if the image does not match the mesh.
ImageU8 apply_distortion(const ImageU8& img, const DistortionMesh& mesh);

}  // namespace xrsim

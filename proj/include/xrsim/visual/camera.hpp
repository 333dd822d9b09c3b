#pragma once

#include "xrsim/perception/pose.hpp"

namespace xrsim {

/// Pinhole intrinsics. Pixel centres sit on integer coordinates.
///
/// Body frame is X forward, Y left, Z up; the camera frame is x right,
/// y down, z forward.
struct CameraModel {
    int width = 0;
    int height = 0;
    double fov_deg = 90.0;  ///< horizontal
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    /// Square pixels, principal point at the image centre. Throws ConfigError
    /// unless 0 < fov < 180 and dimensions are positive.
    static CameraModel from_fov(int width, int height, double fov_deg);

    Mat3 K() const;
    Mat3 K_inv() const;
    /// Same field of view at a different pixel resolution.
    CameraModel scaled(int new_width, int new_height) const;
};

/// v_camera = body_to_camera() * v_body
const Mat3& body_to_camera();

}  // namespace xrsim

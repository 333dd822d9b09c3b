#include "xrsim/visual/camera.hpp"

#include <cmath>
#include <numbers>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

CameraModel CameraModel::from_fov(int width, int height, double fov_deg) {
    if (width <= 0 || height <= 0) throw ConfigError("camera: dimensions must be positive");
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw ConfigError("camera: fov must be in (0, 180) degrees");
    CameraModel c;
    c.width = width;
    c.height = height;
    c.fov_deg = fov_deg;
    c.fx = 0.5 * width / std::tan(0.5 * fov_deg * std::numbers::pi / 180.0);
    c.fy = c.fx;
    c.cx = 0.5 * (width - 1);
    c.cy = 0.5 * (height - 1);
    return c;
}

Mat3 CameraModel::K() const {
    Mat3 k;
    k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
    return k;
}

Mat3 CameraModel::K_inv() const {
    Mat3 k;
    k << 1.0 / fx, 0, -cx / fx, 0, 1.0 / fy, -cy / fy, 0, 0, 1;
    return k;
}

CameraModel CameraModel::scaled(int new_width, int new_height) const {
    return from_fov(new_width, new_height, fov_deg);
}

const Mat3& body_to_camera() {
    static const Mat3 m = [] {
        Mat3 c;
        c << 0, -1, 0,  //
            0, 0, -1,   //
            1, 0, 0;
        return c;
    }();
    return m;
}

}  // namespace xrsim

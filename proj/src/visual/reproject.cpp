#include "xrsim/visual/reproject.hpp"

#include <algorithm>
#include <cmath>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

Prediction predict_pose(std::span<const PoseSample> history, Timestamp display_ts, std::size_t window) {
    if (history.empty()) throw InputError("predict_pose: empty history");
    const PoseSample& last = history.back();
    Prediction out{last.pose, false};

    const std::size_t n = std::min(window, history.size());
    auto recent = history.subspan(history.size() - n);
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < recent.size(); ++i)
        if (recent[i].ts != recent[i - 1].ts) ++distinct;
    if (n < 3 || distinct < 3) {
        out.fallback = true;
        return out;
    }

    const double dt = (display_ts - last.ts).sec();

    // p(t) = p_n + b s + c s^2,  s = t - t_n
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n - 1), 2);
    Eigen::MatrixXd B(static_cast<Eigen::Index>(n - 1), 3);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double s = (recent[i].ts - last.ts).sec();
        A(static_cast<Eigen::Index>(i), 0) = s;
        A(static_cast<Eigen::Index>(i), 1) = s * s;
        B.row(static_cast<Eigen::Index>(i)) = (recent[i].pose.position - last.pose.position).transpose();
    }
    const Eigen::MatrixXd coef = A.colPivHouseholderQr().solve(B);
    out.pose.position = last.pose.position + dt * coef.row(0).transpose() + dt * dt * coef.row(1).transpose();

    // Newest three distinct orientations.
    std::vector<const PoseSample*> pick;
    for (std::size_t i = recent.size(); i-- > 0 && pick.size() < 3;)
        if (pick.empty() || recent[i].ts != pick.back()->ts) pick.push_back(&recent[i]);
    const PoseSample& s2 = *pick[0];
    const PoseSample& s1 = *pick[1];
    const PoseSample& s0 = *pick[2];
    const double h1 = (s1.ts - s0.ts).sec();
    const double h2 = (s2.ts - s1.ts).sec();
    const Vec3 w1 = log_map(s0.pose.orientation.conjugate() * s1.pose.orientation) / h1;
    const Vec3 w2 = log_map(s1.pose.orientation.conjugate() * s2.pose.orientation) / h2;
    const Vec3 alpha = (w2 - w1) / (0.5 * (h1 + h2));
    // w2 is the mean rate over the last interval, i.e. the rate at its midpoint
    const Vec3 w_now = w2 + alpha * (0.5 * h2);
    const Vec3 rotvec = w_now * dt + 0.5 * alpha * dt * dt;
    out.pose.orientation = (last.pose.orientation * exp_map(rotvec)).normalized();
    return out;
}

Mat3 rotation_homography(const Quat& render, const Quat& predicted, const CameraModel& cam) {
    const Mat3& C = body_to_camera();
    const Mat3 Rr = render.normalized().toRotationMatrix();
    const Mat3 Rp = predicted.normalized().toRotationMatrix();
    return cam.K() * C * Rr.transpose() * Rp * C.transpose() * cam.K_inv();
}

namespace {

inline double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-7 ? r : v;
}

inline double bilinear(const ImageU8& img, double x, double y, int c) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double a = img.at(x0, y0, c) * (1 - fx) + img.at(x1, y0, c) * fx;
    const double b = img.at(x0, y1, c) * (1 - fx) + img.at(x1, y1, c) * fx;
    return a * (1 - fy) + b * fy;
}

inline std::uint8_t to_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

ImageU8 warp_homography(const ImageU8& src, const Mat3& H) {
    ImageU8 out(src.width, src.height, src.channels, 0);
    for (int v = 0; v < src.height; ++v) {
        for (int u = 0; u < src.width; ++u) {
            const Vec3 p = H * Vec3(u, v, 1.0);
            if (p.z() <= 1e-12) continue;
            const double x = snap(p.x() / p.z());
            const double y = snap(p.y() / p.z());
            if (x < 0 || y < 0 || x > src.width - 1 || y > src.height - 1) continue;
            for (int c = 0; c < src.channels; ++c) out.at(u, v, c) = to_u8(bilinear(src, x, y, c));
        }
    }
    return out;
}

ImageU8 reproject(const RenderedFrame& frame, const Pose& predicted, const CameraModel& cam) {
    if (frame.image.width != cam.width || frame.image.height != cam.height)
        throw DimensionError("reproject: frame does not match camera model");
    return warp_homography(frame.image, rotation_homography(frame.render_pose.orientation, predicted.orientation, cam));
}

std::array<RadialCoeffs, 3> default_lens_coeffs() {
    const RadialCoeffs red{0.22, 0.24};
    return {red, RadialCoeffs{red.k1 * 0.97, red.k2 * 0.97}, RadialCoeffs{red.k1 * 1.03, red.k2 * 1.03}};
}

Eigen::Vector2d DistortionMesh::lookup(int c, double x, double y) const {
    const double gx = x * (grid_w - 1) / std::max(1, image_width - 1);
    const double gy = y * (grid_h - 1) / std::max(1, image_height - 1);
    const int i0 = std::clamp(static_cast<int>(std::floor(gx)), 0, grid_w - 2);
    const int j0 = std::clamp(static_cast<int>(std::floor(gy)), 0, grid_h - 2);
    const double fx = gx - i0;
    const double fy = gy - j0;
    return (at(c, i0, j0) * (1 - fx) + at(c, i0 + 1, j0) * fx) * (1 - fy) +
           (at(c, i0, j0 + 1) * (1 - fx) + at(c, i0 + 1, j0 + 1) * fx) * fy;
}

namespace {

template <typename RadiusMap>
DistortionMesh build_mesh(const CameraModel& cam, int grid_w, int grid_h, RadiusMap&& map) {
    if (grid_w < 2 || grid_h < 2) throw ConfigError("distortion mesh: grid must be at least 2x2");
    DistortionMesh m;
    m.image_width = cam.width;
    m.image_height = cam.height;
    m.grid_w = grid_w;
    m.grid_h = grid_h;
    for (int c = 0; c < 3; ++c) {
        m.src[c].resize(static_cast<std::size_t>(grid_w) * grid_h);
        for (int j = 0; j < grid_h; ++j) {
            for (int i = 0; i < grid_w; ++i) {
                const double u = static_cast<double>(i) * (cam.width - 1) / (grid_w - 1);
                const double v = static_cast<double>(j) * (cam.height - 1) / (grid_h - 1);
                const double x = (u - cam.cx) / cam.fx;
                const double y = (v - cam.cy) / cam.fy;
                const double r = std::sqrt(x * x + y * y);
                const double scale = r > 0 ? map(c, r) / r : 1.0;
                m.src[c][static_cast<std::size_t>(j) * grid_w + i] =
                    Eigen::Vector2d(cam.cx + cam.fx * x * scale, cam.cy + cam.fy * y * scale);
            }
        }
    }
    return m;
}

}  // namespace

DistortionMesh build_distortion_mesh(const CameraModel& cam, const std::array<RadialCoeffs, 3>& coeffs, int grid_w,
                                     int grid_h) {
    return build_mesh(cam, grid_w, grid_h, [&](int c, double r) {
        const double r2 = r * r;
        return r * (1.0 + coeffs[c].k1 * r2 + coeffs[c].k2 * r2 * r2);
    });
}

DistortionMesh build_inverse_distortion_mesh(const CameraModel& cam, const std::array<RadialCoeffs, 3>& coeffs,
                                             int grid_w, int grid_h) {
    return build_mesh(cam, grid_w, grid_h, [&](int c, double rd) {
        const double k1 = coeffs[c].k1;
        const double k2 = coeffs[c].k2;
        // solve s (1 + k1 s^2 + k2 s^4) = rd
        double s = rd;
        for (int it = 0; it < 50; ++it) {
            const double s2 = s * s;
            const double f = s * (1 + k1 * s2 + k2 * s2 * s2) - rd;
            const double df = 1 + 3 * k1 * s2 + 5 * k2 * s2 * s2;
            const double step = f / df;
            s -= step;
            if (std::abs(step) < 1e-15) break;
        }
        return s;
    });
}

ImageU8 apply_distortion(const ImageU8& img, const DistortionMesh& mesh) {
    if (img.width != mesh.image_width || img.height != mesh.image_height)
        throw DimensionError("apply_distortion: image does not match mesh");
    if (img.channels != 3 && img.channels != 1) throw DimensionError("apply_distortion: need 1 or 3 channels");
    ImageU8 out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                const auto s = mesh.lookup(c, x, y);
                const double sx = std::clamp(snap(s.x()), 0.0, double(img.width - 1));
                const double sy = std::clamp(snap(s.y()), 0.0, double(img.height - 1));
                out.at(x, y, c) = to_u8(bilinear(img, sx, sy, c));
            }
        }
    }
    return out;
}

}  // namespace xrsim

#include "xrsim/visual/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace xrsim {

Scene Scene::generate(std::uint64_t seed) {
    Scene s;
    std::mt19937_64 rng(seed ^ 0x5CE9E5CE9Eull);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> dist(2.5, 7.0);
    std::uniform_real_distribution<double> size(0.3, 1.2);
    std::uniform_real_distribution<double> height(0.4, 2.8);
    std::uniform_int_distribution<int> channel(40, 250);
    constexpr int kBoxes = 14;
    for (int i = 0; i < kBoxes; ++i) {
        // spread evenly around the ring, jittered
        const double a = 2.0 * std::numbers::pi * i / kBoxes + 0.3 * (angle(rng) / (2.0 * std::numbers::pi) - 0.5);
        const double d = dist(rng);
        const double hx = 0.5 * size(rng);
        const double hy = 0.5 * size(rng);
        const double h = height(rng);
        const Vec3 c(d * std::cos(a), d * std::sin(a), 0.0);
        SceneBox b;
        b.min = Vec3(c.x() - hx, c.y() - hy, 0.0);
        b.max = Vec3(c.x() + hx, c.y() + hy, h);
        b.color = {static_cast<std::uint8_t>(channel(rng)), static_cast<std::uint8_t>(channel(rng)),
                   static_cast<std::uint8_t>(channel(rng))};
        s.boxes.push_back(b);
    }
    return s;
}

namespace {

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    std::array<double, 3> rgb{};
};

bool ray_box(const Vec3& o, const Vec3& d, const SceneBox& b, double& t_hit, int& axis, int& sign) {
    double t0 = 1e-6;
    double t1 = std::numeric_limits<double>::infinity();
    int ax = -1;
    int sg = 0;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(d[i]) < 1e-15) {
            if (o[i] < b.min[i] || o[i] > b.max[i]) return false;
            continue;
        }
        const double inv = 1.0 / d[i];
        double ta = (b.min[i] - o[i]) * inv;
        double tb = (b.max[i] - o[i]) * inv;
        int s = -1;
        if (ta > tb) {
            std::swap(ta, tb);
            s = 1;
        }
        if (ta > t0) {
            t0 = ta;
            ax = i;
            sg = s;
        }
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    if (ax < 0) return false;  // origin inside the box
    t_hit = t0;
    axis = ax;
    sign = sg;
    return true;
}

double face_shade(int axis, int sign) {
    static const Vec3 light = Vec3(0.4, 0.25, 0.88).normalized();
    Vec3 n = Vec3::Zero();
    n[axis] = sign;
    return 0.35 + 0.65 * std::max(0.0, n.dot(light));
}

}  // namespace

RenderedFrame render_scene(const Scene& scene, const Pose& pose, const CameraModel& cam) {
    RenderedFrame f;
    f.image = ImageU8(cam.width, cam.height, 3);
    f.render_pose = pose;
    const Mat3 cam_to_world = pose.orientation.normalized().toRotationMatrix() * body_to_camera().transpose();
    const Vec3& o = pose.position;

    for (int v = 0; v < cam.height; ++v) {
        for (int u = 0; u < cam.width; ++u) {
            const Vec3 dc((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0);
            const Vec3 d = cam_to_world * dc;
            Hit hit;
            hit.rgb = {double(scene.background[0]), double(scene.background[1]), double(scene.background[2])};

            if (d.z() < -1e-12) {
                const double t = -o.z() / d.z();
                const Vec3 p = o + t * d;
                if (t > 1e-6 && std::abs(p.x()) <= scene.floor_half_extent &&
                    std::abs(p.y()) <= scene.floor_half_extent) {
                    hit.t = t;
                    const auto ix = static_cast<long>(std::floor(p.x() * 2.0));
                    const auto iy = static_cast<long>(std::floor(p.y() * 2.0));
                    const bool dark = ((ix + iy) & 1) != 0;
                    const double g = dark ? 70.0 : 170.0;
                    hit.rgb = {g, g * 0.95, g * 0.85};
                }
            }
            for (const auto& b : scene.boxes) {
                double t;
                int axis;
                int sign;
                if (ray_box(o, d, b, t, axis, sign) && t < hit.t) {
                    hit.t = t;
                    const double s = face_shade(axis, sign);
                    hit.rgb = {b.color[0] * s, b.color[1] * s, b.color[2] * s};
                }
            }
            for (int c = 0; c < 3; ++c)
                f.image.at(u, v, c) = static_cast<std::uint8_t>(std::clamp(std::lround(hit.rgb[c]), 0L, 255L));
        }
    }
    return f;
}

RenderedFrame render_app(std::uint64_t scene_seed, const Pose& pose, const CameraModel& cam) {
    return render_scene(Scene::generate(scene_seed), pose, cam);
}

}  // namespace xrsim

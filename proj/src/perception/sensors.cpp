#include "xrsim/perception/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

namespace {

std::uint32_t hash3(std::uint64_t seed, std::int64_t x, std::int64_t y) {
    std::uint64_t h = seed * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(x) * 0xC2B2AE3D27D4EB4Full ^
                      static_cast<std::uint64_t>(y) * 0x165667B19E3779F9ull;
    h ^= h >> 33;
    h *= 0xFF51AFD7ED558CCDull;
    h ^= h >> 33;
    return static_cast<std::uint32_t>(h);
}

ImageU8 texture(std::uint64_t seed, int width, int height, std::int64_t shift_x, std::int64_t shift_y) {
    ImageU8 img(width, height, 1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::int64_t u = x + shift_x;
            const std::int64_t v = y + shift_y;
            const bool dark = ((u >> 5) + (v >> 5)) & 1;
            const int base = dark ? 60 : 190;
            const int noise = static_cast<int>(hash3(seed, u >> 1, v >> 1) % 41) - 20;
            img.at(x, y) = static_cast<std::uint8_t>(std::clamp(base + noise, 0, 255));
        }
    }
    return img;
}

}  // namespace

CameraFrame make_camera_frame(std::uint64_t seed, const Pose& pose, Timestamp ts, int width, int height) {
    const Vec3 fwd = pose.orientation * Vec3::UnitX();
    const double yaw = std::atan2(fwd.y(), fwd.x());
    const double pitch = std::asin(std::clamp(fwd.z(), -1.0, 1.0));
    const double f = 0.5 * width;  // 90 degree horizontal view
    const auto sx = static_cast<std::int64_t>(std::llround(-yaw * f));
    const auto sy = static_cast<std::int64_t>(std::llround(-pitch * f));
    CameraFrame frame;
    frame.left = texture(seed, width, height, sx, sy);
    frame.right = texture(seed, width, height, sx + 8, sy);
    frame.ts = ts;
    return frame;
}

Timestamp align_to_period(Timestamp t, const Period& period) {
    if (t.ns <= 0) return Timestamp{};
    return period.slot(period.last_slot_at_or_before(t));
}

VioProxy::VioProxy(VioConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    heading_ = u(rng_);
}

PoseSample VioProxy::update(const CameraFrame& frame, const PoseSample& gt) {
    if (frame.ts != gt.ts) throw InputError("vio_proxy: frame and ground-truth timestamps differ");
    return update(frame.ts, gt);
}

PoseSample VioProxy::update(Timestamp ts, const PoseSample& gt) {
    if (ts != gt.ts) throw InputError("vio_proxy: frame and ground-truth timestamps differ");
    if (!started_) {
        started_ = true;
        start_ts_ = ts;
        last_ts_ = ts;
    }
    if (ts < last_ts_) throw InputError("vio_proxy: time went backwards");
    const double dt = (ts - last_ts_).sec();
    last_ts_ = ts;

    if (dt > 0 && cfg_.drift_rate > 0) {
        std::normal_distribution<double> n(0.0, cfg_.heading_walk * std::sqrt(dt));
        // midpoint heading keeps the step length exact
        const double h0 = heading_;
        heading_ += n(rng_);
        const double hm = 0.5 * (h0 + heading_);
        drift_ += cfg_.drift_rate * dt * Vec3(std::cos(hm), std::sin(hm), 0.0);
    }

    PoseSample out = gt;
    out.source = PoseSource::vio;
    out.pose.position += drift_;
    if (cfg_.pos_sigma > 0) {
        std::normal_distribution<double> n(0.0, cfg_.pos_sigma);
        for (int i = 0; i < 3; ++i) out.pose.position[i] += n(rng_);
    }
    Quat q = gt.pose.orientation;
    if (cfg_.yaw_drift_deg_per_s != 0.0) {
        const double yaw = deg_to_rad(cfg_.yaw_drift_deg_per_s) * (ts - start_ts_).sec();
        q = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())) * q;
    }
    if (cfg_.rot_sigma_deg > 0) {
        std::normal_distribution<double> n(0.0, deg_to_rad(cfg_.rot_sigma_deg));
        Vec3 rv(n(rng_), n(rng_), n(rng_));
        q = q * exp_map(rv);
    }
    out.pose.orientation = q.normalized();
    return out;
}

}  // namespace xrsim

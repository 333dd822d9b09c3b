#pragma once

#include <cstdint>
#include <random>

#include "xrsim/common/image.hpp"
#include "xrsim/perception/pose.hpp"
#include "xrsim/perception/trajectory.hpp"

namespace xrsim {

struct CameraFrame {
    ImageU8 left;   ///< 8-bit grayscale
    ImageU8 right;
    Timestamp ts;
};

/// Procedural stereo pair: a checkerboard plus seed-hashed noise, shifted
/// with the head yaw so consecutive frames differ. `ts` should already sit
/// on the IMU grid (see align_to_period).
CameraFrame make_camera_frame(std::uint64_t seed, const Pose& pose, Timestamp ts, int width, int height);

/// Largest multiple of `period` not after t.
Timestamp align_to_period(Timestamp t, const Period& period);

struct VioConfig {
    double latency_ms = 0.0;
    double pos_sigma = 0.0;      ///< m, per axis
    double rot_sigma_deg = 0.0;  ///< per axis
    double drift_rate = 0.0;     ///< m/s
    double yaw_drift_deg_per_s = 0.0;
    double heading_walk = 0.05;  ///< rad/sqrt(s) wander of the drift direction
};

/// Stand-in for visual-inertial odometry: ground truth plus white noise and
/// an accumulating drift. Drift moves at constant speed `drift_rate` in a
/// horizontal direction that random-walks, so |drift(T)| stays close to
/// drift_rate*T. Stateful; one instance per stream.
class VioProxy {
public:
    VioProxy(VioConfig cfg, std::uint64_t seed);

    /// Throws InputError if frame.ts != gt.ts or time goes backwards.
    PoseSample update(const CameraFrame& frame, const PoseSample& gt);
    PoseSample update(Timestamp frame_ts, const PoseSample& gt);

    Duration latency() const { return Duration::millis(cfg_.latency_ms); }
    Timestamp available_at(Timestamp frame_ts) const { return frame_ts + latency(); }
    const Vec3& drift() const { return drift_; }
    const VioConfig& config() const { return cfg_; }

private:
    VioConfig cfg_;
    std::mt19937_64 rng_;
    Vec3 drift_ = Vec3::Zero();
    double heading_ = 0.0;
    bool started_ = false;
    Timestamp start_ts_;
    Timestamp last_ts_;
};

}  // namespace xrsim

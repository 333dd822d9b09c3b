#include "xrsim/perception/trajectory.hpp"

#include <cmath>
#include <numbers>

namespace xrsim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TrajectorySpec TrajectorySpec::stationary() {
    TrajectorySpec s;
    s.radius = 0.0;
    s.angular_rate = 0.0;
    s.bob_amplitude = 0.0;
    s.yaw_rate = 0.0;
    s.yaw_amplitude = 0.0;
    s.pitch_amplitude = 0.0;
    return s;
}

TrajectoryState trajectory_state(const TrajectorySpec& s, double t) {
    TrajectoryState st;
    const double th = s.angular_rate * t;
    const double wb = kTwoPi * s.bob_frequency;
    const double r = s.radius;
    const double w = s.angular_rate;

    st.position = Vec3(r * std::cos(th), r * std::sin(th), s.height + s.bob_amplitude * std::sin(wb * t));
    st.velocity = Vec3(-r * w * std::sin(th), r * w * std::cos(th), s.bob_amplitude * wb * std::cos(wb * t));
    st.acceleration =
        Vec3(-r * w * w * std::cos(th), -r * w * w * std::sin(th), -s.bob_amplitude * wb * wb * std::sin(wb * t));

    const double wy = kTwoPi * s.yaw_frequency;
    const double wp = kTwoPi * s.pitch_frequency;
    const double yaw = s.yaw_offset + s.yaw_rate * t + s.yaw_amplitude * std::sin(wy * t);
    const double yaw_dot = s.yaw_rate + s.yaw_amplitude * wy * std::cos(wy * t);
    const double pitch = s.pitch_amplitude * std::sin(wp * t);
    const double pitch_dot = s.pitch_amplitude * wp * std::cos(wp * t);

    const Quat qz(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
    const Quat qy(Eigen::AngleAxisd(pitch, Vec3::UnitY()));
    st.orientation = (qz * qy).normalized();
    // R = Rz Ry  =>  R^T dR = Ry^T [yaw_dot z]x Ry + [pitch_dot y]x
    st.angular_velocity = qy.conjugate() * Vec3(0.0, 0.0, yaw_dot) + Vec3(0.0, pitch_dot, 0.0);
    return st;
}

PoseSample ground_truth_pose(const TrajectorySpec& spec, Timestamp t) {
    const auto st = trajectory_state(spec, t.sec());
    PoseSample ps;
    ps.pose.position = st.position;
    ps.pose.orientation = st.orientation;
    ps.ts = t;
    ps.source = PoseSource::ground_truth;
    ps.linear_velocity = st.velocity;
    return ps;
}

ImuSample ingest_imu(const Vec3& gyro_deg_per_s, const Vec3& accel, Timestamp ts) {
    ImuSample s;
    s.angular_velocity = gyro_deg_per_s * (std::numbers::pi / 180.0);
    s.linear_acceleration = accel;
    s.ts = ts;
    return s;
}

ImuSample sample_imu(const TrajectorySpec& spec, Timestamp t) {
    const auto st = trajectory_state(spec, t.sec());
    ImuSample s;
    s.angular_velocity = st.angular_velocity;
    s.linear_acceleration = st.orientation.conjugate() * (st.acceleration - spec.gravity);
    s.ts = t;
    return s;
}

ImuSample sample_imu(const TrajectorySpec& spec, Timestamp t, const ImuNoise& noise, std::mt19937_64& rng) {
    ImuSample s = sample_imu(spec, t);
    if (noise.gyro_sigma > 0) {
        std::normal_distribution<double> n(0.0, noise.gyro_sigma);
        for (int i = 0; i < 3; ++i) s.angular_velocity[i] += n(rng);
    }
    if (noise.accel_sigma > 0) {
        std::normal_distribution<double> n(0.0, noise.accel_sigma);
        for (int i = 0; i < 3; ++i) s.linear_acceleration[i] += n(rng);
    }
    return s;
}

}  // namespace xrsim

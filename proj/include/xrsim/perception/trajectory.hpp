#pragma once

#include <cstdint>
#include <random>

#include "xrsim/perception/pose.hpp"

namespace xrsim {

/// Analytic head path: a (possibly zero-radius) horizontal circle with a
/// vertical bob, plus yaw = yaw_offset + yaw_rate*t + yaw_amp*sin(2 pi f t)
/// and pitch = pitch_amp*sin(2 pi f t). Orientation is Rz(yaw)*Ry(pitch).
struct TrajectorySpec {
    double radius = 1.0;          ///< m
    double angular_rate = 0.5;    ///< rad/s around the circle
    double height = 1.6;          ///< m
    double bob_amplitude = 0.02;  ///< m
    double bob_frequency = 1.0;   ///< Hz

    double yaw_offset = 0.0;      ///< rad
    double yaw_rate = 0.5;        ///< rad/s
    double yaw_amplitude = 0.2;   ///< rad
    double yaw_frequency = 0.3;   ///< Hz
    double pitch_amplitude = 0.1; ///< rad
    double pitch_frequency = 0.2; ///< Hz

    Vec3 gravity = Vec3(0.0, 0.0, -9.81);
    std::uint64_t seed = 1;

    static TrajectorySpec stationary();
};

struct TrajectoryState {
    Vec3 position;
    Vec3 velocity;
    Vec3 acceleration;       ///< world frame
    Quat orientation;        ///< body->world
    Vec3 angular_velocity;   ///< body frame, rad/s
};

TrajectoryState trajectory_state(const TrajectorySpec& spec, double t_sec);

/// Closed-form pose and velocity; deterministic in (spec, t).
PoseSample ground_truth_pose(const TrajectorySpec& spec, Timestamp t);

struct ImuSample {
    Vec3 angular_velocity = Vec3::Zero();     ///< rad/s, body frame
    Vec3 linear_acceleration = Vec3::Zero();  ///< specific force, m/s^2, body frame
    Timestamp ts;
};

struct ImuNoise {
    double gyro_sigma = 0.0;   ///< rad/s
    double accel_sigma = 0.0;  ///< m/s^2
};

/// Gyro readings arrive in deg/s from devices; this is the only place they are converted.
ImuSample ingest_imu(const Vec3& gyro_deg_per_s, const Vec3& accel, Timestamp ts);

/// Body-frame angular velocity and specific force R^T (a_world - g), plus per-axis Gaussian noise.
ImuSample sample_imu(const TrajectorySpec& spec, Timestamp t, const ImuNoise& noise, std::mt19937_64& rng);
ImuSample sample_imu(const TrajectorySpec& spec, Timestamp t);

}  // namespace xrsim

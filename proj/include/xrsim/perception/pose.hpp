#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "xrsim/runtime/time.hpp"

namespace xrsim {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

/// Position in the world frame, orientation body->world (Hamilton).
struct Pose {
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();
};

enum class PoseSource { vio, integrator, ground_truth };

const char* to_string(PoseSource s);

struct PoseSample {
    Pose pose;
    Timestamp ts;
    PoseSource source = PoseSource::ground_truth;
    Vec3 linear_velocity = Vec3::Zero();
};

/// Rotation by `angle` radians about `axis` (need not be unit).
Quat axis_angle(const Vec3& axis, double angle);
/// Rotation vector (axis * angle) -> quaternion.
Quat exp_map(const Vec3& rotvec);
/// Quaternion -> rotation vector with angle in [0, pi].
Vec3 log_map(const Quat& q);
/// Geodesic angle between two orientations, radians in [0, pi].
double angular_distance(const Quat& a, const Quat& b);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

}  // namespace xrsim

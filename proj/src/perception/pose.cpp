#include "xrsim/perception/pose.hpp"

#include <cmath>
#include <numbers>

namespace xrsim {

const char* to_string(PoseSource s) {
    switch (s) {
        case PoseSource::vio: return "vio";
        case PoseSource::integrator: return "integrator";
        case PoseSource::ground_truth: return "ground_truth";
    }
    return "?";
}

Quat axis_angle(const Vec3& axis, double angle) {
    return Quat(Eigen::AngleAxisd(angle, axis.normalized()));
}

Quat exp_map(const Vec3& rotvec) {
    const double theta = rotvec.norm();
    if (theta < 1e-12) {
        Quat q(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
        return q.normalized();
    }
    return Quat(Eigen::AngleAxisd(theta, rotvec / theta));
}

Vec3 log_map(const Quat& qin) {
    Quat q = qin.normalized();
    if (q.w() < 0) q.coeffs() = -q.coeffs();
    const Vec3 v = q.vec();
    const double s = v.norm();
    if (s < 1e-12) return 2.0 * v;
    const double angle = 2.0 * std::atan2(s, q.w());
    return v / s * angle;
}

double angular_distance(const Quat& a, const Quat& b) {
    // atan2 form stays accurate near zero, unlike acos
    const Quat rel = a.normalized().conjugate() * b.normalized();
    const double s = rel.vec().norm();
    return 2.0 * std::atan2(s, std::abs(rel.w()));
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace xrsim

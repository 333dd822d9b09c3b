#include "xrsim/perception/integrator.hpp"

#include <algorithm>
#include <vector>

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

namespace {

struct State {
    Vec3 p;
    Vec3 v;
    Eigen::Vector4d q;  // w, x, y, z
};

Quat to_quat(const Eigen::Vector4d& q) { return Quat(q[0], q[1], q[2], q[3]); }

State derivative(const State& s, const Vec3& w, const Vec3& a, const Vec3& g) {
    const Quat q = to_quat(s.q);
    const Quat qn = q.normalized();
    // q_dot = 1/2 q (x) (0, w)
    const Quat dq = q * Quat(0.0, w.x(), w.y(), w.z());
    State d;
    d.p = s.v;
    d.v = qn * a + g;
    d.q = 0.5 * Eigen::Vector4d(dq.w(), dq.x(), dq.y(), dq.z());
    return d;
}

State axpy(const State& s, double h, const State& d) {
    return State{s.p + h * d.p, s.v + h * d.v, s.q + h * d.q};
}

ImuSample interpolate_at(std::span<const ImuSample> imu, double tt) {
    const std::size_t n = imu.size();
    if (n == 1) return imu[0];
    // first sample with ts > t
    auto it = std::upper_bound(imu.begin(), imu.end(), tt,
                               [](double v, const ImuSample& s) { return v < static_cast<double>(s.ts.ns); });
    const std::size_t hi = static_cast<std::size_t>(it - imu.begin());
    const std::size_t m = std::min<std::size_t>(4, n);
    // window [lo, lo+m) centred on the bracketing pair where possible
    std::size_t lo = hi >= 2 ? hi - 2 : 0;
    lo = std::min(lo, n - m);

    ImuSample out;
    out.angular_velocity.setZero();
    out.linear_acceleration.setZero();
    for (std::size_t i = lo; i < lo + m; ++i) {
        double L = 1.0;
        const double ti = static_cast<double>(imu[i].ts.ns);
        for (std::size_t j = lo; j < lo + m; ++j) {
            if (j == i) continue;
            const double tj = static_cast<double>(imu[j].ts.ns);
            L *= (tt - tj) / (ti - tj);
        }
        out.angular_velocity += L * imu[i].angular_velocity;
        out.linear_acceleration += L * imu[i].linear_acceleration;
    }
    return out;
}

}  // namespace

ImuSample interpolate_imu(std::span<const ImuSample> imu, Timestamp t) {
    if (imu.empty()) throw InputError("interpolate_imu: no samples");
    ImuSample s = interpolate_at(imu, static_cast<double>(t.ns));
    s.ts = t;
    return s;
}

PoseSample rk4_integrate(const PoseSample& anchor, std::span<const ImuSample> imu, Timestamp t_end,
                         const Vec3& gravity) {
    for (std::size_t i = 1; i < imu.size(); ++i)
        if (!(imu[i - 1].ts < imu[i].ts)) throw InputError("rk4_integrate: IMU timestamps not strictly increasing");
    if (t_end < anchor.ts) throw InputError("rk4_integrate: t_end precedes anchor");

    PoseSample out = anchor;
    out.source = PoseSource::integrator;
    out.ts = t_end;
    if (t_end == anchor.ts) return out;
    if (imu.empty()) throw InputError("rk4_integrate: no IMU samples for a nonzero interval");

    std::vector<Timestamp> knots{anchor.ts};
    for (const auto& s : imu)
        if (s.ts > anchor.ts && s.ts < t_end) knots.push_back(s.ts);
    knots.push_back(t_end);

    const Quat q0 = anchor.pose.orientation.normalized();
    State s{anchor.pose.position, anchor.linear_velocity, Eigen::Vector4d(q0.w(), q0.x(), q0.y(), q0.z())};

    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const Timestamp ta = knots[k];
        const Timestamp tb = knots[k + 1];
        const double h = (tb - ta).sec();
        const auto m0 = interpolate_at(imu, static_cast<double>(ta.ns));
        const auto mh = interpolate_at(imu, 0.5 * static_cast<double>(ta.ns + tb.ns));
        const auto m1 = interpolate_at(imu, static_cast<double>(tb.ns));

        const State k1 = derivative(s, m0.angular_velocity, m0.linear_acceleration, gravity);
        const State k2 = derivative(axpy(s, h / 2, k1), mh.angular_velocity, mh.linear_acceleration, gravity);
        const State k3 = derivative(axpy(s, h / 2, k2), mh.angular_velocity, mh.linear_acceleration, gravity);
        const State k4 = derivative(axpy(s, h, k3), m1.angular_velocity, m1.linear_acceleration, gravity);
        s.p += h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
        s.v += h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
        s.q += h / 6 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q);
        s.q.normalize();
    }

    out.pose.position = s.p;
    out.pose.orientation = to_quat(s.q).normalized();
    out.linear_velocity = s.v;
    return out;
}

}  // namespace xrsim

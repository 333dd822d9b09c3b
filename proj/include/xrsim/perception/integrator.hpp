#pragma once

#include <span>

#include "xrsim/perception/pose.hpp"
#include "xrsim/perception/trajectory.hpp"

namespace xrsim {

/// Classical RK4 strapdown integration from `anchor` to `t_end`.
///
/// Steps run between consecutive knots (anchor ts, every sample ts inside
/// (anchor, t_end), t_end). Stage measurements at off-sample times come from
/// 4-point Lagrange interpolation over the nearest samples. Samples outside
/// [anchor.ts, t_end] only support interpolation. Throws InputError if
/// timestamps are not strictly increasing, if t_end < anchor.ts, or if a
/// nonzero interval has no samples to integrate.
PoseSample rk4_integrate(const PoseSample& anchor, std::span<const ImuSample> imu, Timestamp t_end,
                         const Vec3& gravity);

/// Measurement at time t interpolated from `imu` (cubic where 4 samples are available).
ImuSample interpolate_imu(std::span<const ImuSample> imu, Timestamp t);

}  // namespace xrsim

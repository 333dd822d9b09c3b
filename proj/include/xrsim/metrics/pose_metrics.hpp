#pragma once

#include <utility>
#include <vector>

#include "xrsim/perception/pose.hpp"

namespace xrsim {

using Trajectory = std::vector<PoseSample>;

/// Throws InputError unless timestamps strictly increase.
void check_trajectory(const Trajectory& t, const char* what);

struct Association {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  ///< (est index, gt index)
};

/// Nearest-timestamp association; pairs further apart than max_gap are dropped.
Association associate(const Trajectory& est, const Trajectory& gt, Duration max_gap = Duration::millis(5.0));

/// gt ~ scale * R * est + t
struct Alignment {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    double scale = 1.0;
    bool degenerate = false;  ///< points (nearly) collinear; rotation about the line is unconstrained
    std::size_t pairs = 0;

    Pose apply(const Pose& p) const;
};

/// Least-squares (Umeyama) alignment of est onto gt. Rigid unless with_scale.
/// Throws InputError with fewer than 3 associated pairs.
Alignment align_trajectories(const Trajectory& est, const Trajectory& gt, bool with_scale = false,
                             Duration max_gap = Duration::millis(5.0));

Trajectory apply_alignment(const Alignment& a, const Trajectory& est);

struct AteResult {
    double rotation_deg = 0.0;  ///< RMSE of geodesic angle
    double translation_m = 0.0; ///< RMSE of position distance
    std::size_t pairs = 0;
};

/// Over associated pairs of an already aligned estimate.
AteResult ate(const Trajectory& est_aligned, const Trajectory& gt, Duration max_gap = Duration::millis(5.0));

struct ErrorStats {
    double mean = 0.0;
    double rmse = 0.0;
    double median = 0.0;
    double max = 0.0;
    double std = 0.0;
};

ErrorStats summarize(std::vector<double> values);

struct RpeResult {
    std::vector<double> translation_m;
    std::vector<double> rotation_deg;
    ErrorStats translation;
    ErrorStats rotation;
};

/// Relative pose error over pose pairs `delta` apart (matched within max_gap):
/// E = (G_i^-1 G_j)^-1 (E_i^-1 E_j). Throws InputError if delta <= 0 or
/// exceeds the trajectory span.
RpeResult rpe(const Trajectory& est, const Trajectory& gt, Duration delta, Duration max_gap = Duration::millis(5.0));

}  // namespace xrsim

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xrsim/metrics/pose_metrics.hpp"
#include "xrsim/metrics/timing.hpp"

namespace xrsim {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  ///< population
    std::size_t count = 0;
};

MeanStd mean_std(std::span<const double> v);

constexpr double kMtpTargetVrMs = 20.0;
constexpr double kMtpTargetArMs = 5.0;

struct MtpSummary {
    MeanStd total_ms;
    MeanStd imu_age_ms;
    MeanStd reprojection_ms;
    MeanStd swap_ms;
    double max_ms = 0.0;
    double within_vr = 0.0;  ///< fraction of frames under the VR target
    double within_ar = 0.0;
};

MtpSummary summarize_mtp(const std::vector<MtpRecord>& records);

/// Per-frame image scores; SSIM is clamped into [0, 1] before averaging.
struct ImageScores {
    std::vector<double> ssim_raw;
    std::vector<double> flip;  ///< mean FLIP error per frame
};

struct QualityReport {
    MeanStd ssim;
    MeanStd one_minus_flip;
    std::size_t ssim_clamped = 0;  ///< frames whose raw SSIM fell below 0

    AteResult ate;
    Alignment alignment;
    double rpe_delta_s = 0.0;
    std::size_t rpe_pairs = 0;
    ErrorStats rpe_translation;
    ErrorStats rpe_rotation;

    MtpSummary mtp;
};

QualityReport summarize_images(const ImageScores& scores);

}  // namespace xrsim

#include "xrsim/metrics/report.hpp"

#include <algorithm>
#include <cmath>

namespace xrsim {

MeanStd mean_std(std::span<const double> v) {
    MeanStd r;
    r.count = v.size();
    if (v.empty()) return r;
    double s = 0.0;
    for (double x : v) s += x;
    r.mean = s / static_cast<double>(v.size());
    double sq = 0.0;
    for (double x : v) sq += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(sq / static_cast<double>(v.size()));
    return r;
}

MtpSummary summarize_mtp(const std::vector<MtpRecord>& records) {
    MtpSummary s;
    std::vector<double> total, age, rep, swap;
    std::size_t vr = 0, ar = 0;
    for (const auto& r : records) {
        const double t = r.total().ms();
        total.push_back(t);
        age.push_back(r.imu_age.ms());
        rep.push_back(r.reprojection.ms());
        swap.push_back(r.swap.ms());
        s.max_ms = std::max(s.max_ms, t);
        vr += t < kMtpTargetVrMs;
        ar += t < kMtpTargetArMs;
    }
    s.total_ms = mean_std(total);
    s.imu_age_ms = mean_std(age);
    s.reprojection_ms = mean_std(rep);
    s.swap_ms = mean_std(swap);
    if (!records.empty()) {
        s.within_vr = static_cast<double>(vr) / static_cast<double>(records.size());
        s.within_ar = static_cast<double>(ar) / static_cast<double>(records.size());
    }
    return s;
}

QualityReport summarize_images(const ImageScores& scores) {
    QualityReport q;
    std::vector<double> ssim, omf;
    for (double s : scores.ssim_raw) {
        if (s < 0.0) ++q.ssim_clamped;
        ssim.push_back(std::clamp(s, 0.0, 1.0));
    }
    for (double f : scores.flip) omf.push_back(std::clamp(1.0 - f, 0.0, 1.0));
    q.ssim = mean_std(ssim);
    q.one_minus_flip = mean_std(omf);
    return q;
}

}  // namespace xrsim

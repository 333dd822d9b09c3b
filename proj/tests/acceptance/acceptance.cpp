// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include "oracles/gsw_reference.hpp"
#include "support/audio_cases.hpp"
#include "support/metrics_cases.hpp"
#include "support/rk4_cases.hpp"
#include "support/session_cases.hpp"
#include "support/stress.hpp"
#include "support/visual_cases.hpp"

using namespace xrsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// the default session is run twice and shared by the MTP and determinism criteria
struct DefaultRuns {
    fs::path a, b;
    SessionReport report;
    double seconds_a = 0, seconds_b = 0;
};

DefaultRuns run_default_twice() {
    DefaultRuns d;
    const auto root = fs::temp_directory_path() / "xrsim_acceptance";
    fs::remove_all(root);
    d.a = root / "a";
    d.b = root / "b";
    const SessionConfig cfg;
    auto t0 = std::chrono::steady_clock::now();
    d.report = run_session(cfg, d.a.string());
    d.seconds_a = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    run_session(cfg, d.b.string());
    d.seconds_b = seconds_since(t0);
    return d;
}

}  // namespace

int main() {
    criterion("switchboard stress", [] {
        const auto r = support::switchboard_stress(100000, 4, 4);
        bool all = true;
        for (auto n : r.sync_received) all = all && n == r.published;
        const bool pass = r.published == 100000 && r.sync_received.size() == 4 && all && r.sync_out_of_order == 0 &&
                          r.torn == 0 && r.async_regressions == 0 && r.seconds < 10.0;
        std::ostringstream os;
        os << r.published << " publishes, 4 sync readers " << (all ? "received all" : "LOST values") << ", reordered "
           << r.sync_out_of_order << ", async reads " << r.async_reads << ", torn " << r.torn << ", regressions "
           << r.async_regressions << ", " << num(r.seconds) << " s (limit 10)";
        return Outcome{pass, os.str()};
    });

    criterion("scheduler arithmetic", [] {
        const auto cfg = support::schedule_only(support::zero_cost(SessionConfig{}));
        const auto c = support::run_counts(cfg);
        auto slow = cfg;
        slow.costs["reprojection"] = CostModel::constant(12.0);
        const auto s = support::run_counts(slow);
        const bool counts = c.at("camera").invocations == 150 && c.at("imu").invocations == 5000 &&
                            c.at("reprojection").invocations == 1200 && c.at("audio_encode").invocations == 480;
        const bool halved = s.at("reprojection").invocations == 600 && s.at("reprojection").skips == 600;
        std::ostringstream os;
        os << "camera/imu/display/audio = " << c.at("camera").invocations << "/" << c.at("imu").invocations << "/"
           << c.at("reprojection").invocations << "/" << c.at("audio_encode").invocations
           << " (want 150/5000/1200/480); 12 ms reprojection -> " << s.at("reprojection").invocations / 10.0
           << " Hz with " << s.at("reprojection").skips << " skipped slots";
        return Outcome{counts && halved, os.str()};
    });

    criterion("rk4 integrator", [] {
        const auto yaw = support::constant_yaw_rate();
        const double ratio = support::convergence_ratio();
        const auto circle = support::circle_windows();
        const bool pass = yaw.yaw_error <= 1e-6 && ratio >= 8 && ratio <= 32 && circle.position <= 1e-4;
        return Outcome{pass, "yaw error " + num(yaw.yaw_error) + " rad (<= 1e-6), convergence ratio " + num(ratio) +
                                 " (in [8, 32]), circle over 66.7 ms windows " + num(circle.position) +
                                 " m (<= 1e-4)"};
    });

    DefaultRuns runs;
    std::string runs_error;
    try {
        runs = run_default_twice();
    } catch (const std::exception& e) {
        runs_error = e.what();
    }

    criterion("motion-to-photon", [&] {
        if (!runs_error.empty()) return Outcome{false, "default session failed: " + runs_error};
        const auto recs = read_mtp_csv((runs.a / "mtp.csv").string());
        std::size_t bad = 0;
        for (const auto& m : recs) bad += m.total() != m.imu_age + m.reprojection + m.swap;
        const auto& mtp = runs.report.quality.mtp;
        const bool pass = !recs.empty() && bad == 0 && mtp.total_ms.mean <= runs.report.mtp_bound_ms;
        return Outcome{pass, std::to_string(recs.size()) + " records, " + std::to_string(bad) +
                                 " violate the identity; mean " + num(mtp.total_ms.mean) + " +- " +
                                 num(mtp.total_ms.std) + " ms <= bound " + num(runs.report.mtp_bound_ms) +
                                 " ms; under 20 ms (VR) " + num(100 * mtp.within_vr) + "%, under 5 ms (AR) " +
                                 num(100 * mtp.within_ar) + "%"};
    });

    criterion("reprojection", [] {
        const auto id = support::identity_reprojection();
        const double yaw = support::yaw_reprojection_ssim(2.0);
        const double rt = support::roundtrip_reprojection_ssim(2.0);
        const bool pass = id.ssim == 1.0 && yaw >= 0.90 && rt >= 0.98;
        return Outcome{pass, "2560x1440: identity interior SSIM " + num(id.ssim) + ", 2 deg yaw vs re-render " +
                                 num(yaw) + " (>= 0.90), forward-inverse " + num(rt) + " (>= 0.98)"};
    });

    criterion("audio", [] {
        const double conv = support::binaural_vs_direct();
        const double comm = support::commutation_error(100);
        const double energy = support::rotation_energy_error();
        const auto t = support::time_playback_chain();
        const bool pass = conv < 1e-5 && comm <= 1e-6 && energy <= 1e-9 && t.median_ms < 20.8 / 4;
        return Outcome{pass, "FFT vs direct " + num(conv) + " (< 1e-5), commutation " + num(comm) +
                                 " (<= 1e-6), energy " + num(energy) + " (<= 1e-9), 1024-block chain median " +
                                 num(t.median_ms) + " ms, max " + num(t.max_ms) + " ms (deadline 20.8)"};
    });

    criterion("gsw hologram", [] {
        const auto p = support::three_point_problem();
        const auto r = gsw_hologram(p, 10);
        std::vector<oracle::GswPoint> pts;
        for (const auto& d : p.points) pts.push_back({d.x, d.y, p.plane_depth(d.plane), d.amplitude});
        const auto ref = oracle::gsw(p.width, p.height, p.pixel_pitch, p.wavelength, pts, 10);
        double diff = 0;
        for (std::size_t k = 0; k < ref.uniformity.size(); ++k)
            diff = std::max(diff, std::abs(ref.uniformity[k] - r.uniformity[k]));
        const bool pass = r.uniformity.back() >= 0.9 && r.uniformity.back() >= r.uniformity.front() &&
                          ref.uniformity.back() >= 0.9 && diff < 1e-6;
        return Outcome{pass, "uniformity " + num(r.uniformity.front()) + " -> " + num(r.uniformity.back()) +
                                 " (>= 0.9), reference " + num(ref.uniformity.back()) + ", max deviation " +
                                 num(diff)};
    });

    criterion("pose metrics", [] {
        const auto a = support::known_rigid_alignment();
        const double ratio = support::rpe_drift_ratio();
        const auto gt = support::sample_trajectory(support::wandering_spec(), 5, 30, PoseSource::ground_truth);
        const auto e = ate(gt, gt);
        const auto r = rpe(gt, gt, Duration::seconds(1));
        const bool zeros = e.translation_m == 0 && e.rotation_deg == 0 && r.translation.max == 0 &&
                           r.rotation.max < 1e-6;
        const bool pass = a.ate_m < 1e-9 && std::abs(ratio - 1) <= 0.01 && zeros;
        return Outcome{pass, "aligned ATE " + num(a.ate_m) + " m (< 1e-9), RPE/(r delta) " + num(ratio) +
                                 " (1 +- 0.01), identical inputs " + (zeros ? "all zero" : "NONZERO") +
                                 " (RPE rotation max " + num(r.rotation.max) + " deg)"};
    });

    criterion("image metrics", [] {
        bool identical = true;
        for (const auto& p : support::random_image_pairs(5))
            identical = identical && ssim(p.a, p.a) == 1.0 && 1.0 - flip_mean(p.a, p.a) == 1.0;
        const auto sweep = support::flip_contrast_sweep();
        bool monotone = true;
        for (std::size_t i = 1; i < sweep.size(); ++i) monotone = monotone && sweep[i] >= sweep[i - 1];
        const auto agree = support::metrics_vs_reference(10);
        const bool pass = identical && monotone && agree.ssim_max_diff < 1e-3 && agree.flip_max_diff < 1e-3;
        return Outcome{pass, std::string("identical pairs ") + (identical ? "score 1" : "DO NOT score 1") +
                                 ", contrast sweep " + (monotone ? "monotone" : "NOT monotone") + " (" +
                                 num(sweep[1]) + " .. " + num(sweep.back()) + "), max |diff| vs reference SSIM " +
                                 num(agree.ssim_max_diff) + ", FLIP " + num(agree.flip_max_diff) + " (< 1e-3)"};
    });

    criterion("end-to-end determinism", [&] {
        if (!runs_error.empty()) return Outcome{false, "default session failed: " + runs_error};
        std::string diff;
        const bool same = support::same_tree(runs.a, runs.b, &diff);
        const bool fast = runs.seconds_a < 60 && runs.seconds_b < 60;
        const bool ok = runs.report.ok();
        return Outcome{same && fast && ok, std::string(same ? "byte-identical session directories" : "differ at " + diff) +
                                               ", runs took " + num(runs.seconds_a) + " s and " +
                                               num(runs.seconds_b) + " s (< 60), invariants " +
                                               (ok ? "hold" : "VIOLATED")};
    });

    if (runs_error.empty()) fs::remove_all(runs.a.parent_path());
    std::printf("%d of 10 criteria failed\n", failures);
    return failures;
}

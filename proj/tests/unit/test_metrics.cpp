#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "support/metrics_cases.hpp"
#include "xrsim/metrics/report.hpp"
#include "xrsim/metrics/timing.hpp"

using namespace xrsim;

namespace {

InvocationRecord rec(std::string name, std::uint64_t seq, double start_ms, double wall_ms, double cpu_ms,
                     Duration deadline) {
    InvocationRecord r;
    r.plugin = std::move(name);
    r.seq = seq;
    r.start = Timestamp{0} + Duration::millis(start_ms);
    r.end = r.start + Duration::millis(wall_ms);
    r.cpu_time = Duration::millis(cpu_ms);
    r.deadline_met = r.end - r.start <= deadline;
    return r;
}

}  // namespace

TEST(Mtp, Decomposition) {
    const auto m = record_mtp(Timestamp{0}, Timestamp{1'000'000}, Timestamp{3'000'000}, Timestamp{7'000'000}, 4);
    EXPECT_EQ(m.imu_age, Duration::millis(1));
    EXPECT_EQ(m.reprojection, Duration::millis(2));
    EXPECT_EQ(m.swap, Duration::millis(4));
    EXPECT_EQ(m.total(), Duration::millis(7));
    EXPECT_EQ(m.frame_seq, 4u);
    EXPECT_THROW(record_mtp(Timestamp{5}, Timestamp{4}, Timestamp{6}, Timestamp{7}), InputError);
    EXPECT_THROW(record_mtp(Timestamp{0}, Timestamp{4}, Timestamp{3}, Timestamp{7}), InputError);
    EXPECT_THROW(record_mtp(Timestamp{0}, Timestamp{1}, Timestamp{3}, Timestamp{2}), InputError);
}

TEST(Mtp, MissedVsyncShowsUpInSwap) {
    const auto display = Period::from_hz(120);
    // reprojection finishing just after a vsync waits for the next one
    const Timestamp end = display.slot(3) + Duration::micros(10);
    const auto m = record_mtp(display.slot(2), display.slot(2) + Duration::millis(1), end, next_vsync(end, display));
    EXPECT_EQ(next_vsync(end, display), display.slot(4));
    EXPECT_EQ(m.swap, display.slot(4) - end);
    EXPECT_GT(m.swap, Duration::millis(8));
    EXPECT_EQ(next_vsync(display.slot(5), display), display.slot(5));
}

TEST(Mtp, ReferenceTargets) {
    EXPECT_EQ(kMtpTargetVrMs, 20.0);
    EXPECT_EQ(kMtpTargetArMs, 5.0);
    std::vector<MtpRecord> recs;
    for (int i = 0; i < 4; ++i)
        recs.push_back(record_mtp(Timestamp{0}, Timestamp{0} + Duration::millis(2), Timestamp{0} + Duration::millis(4),
                                  Timestamp{0} + Duration::millis(4 + 6.0 * i)));
    const auto s = summarize_mtp(recs);
    EXPECT_NEAR(s.total_ms.mean, 13.0, 1e-9);
    EXPECT_NEAR(s.within_vr, 0.75, 1e-12);  // 4, 10, 16 ms under 20
    EXPECT_NEAR(s.within_ar, 0.25, 1e-12);
    EXPECT_NEAR(s.max_ms, 22.0, 1e-9);
}

TEST(Mtp, CsvRoundTrip) {
    const auto path = (std::filesystem::temp_directory_path() / "xrsim_mtp.csv").string();
    std::vector<MtpRecord> recs{record_mtp(Timestamp{1}, Timestamp{5}, Timestamp{9}, Timestamp{20}, 0),
                                record_mtp(Timestamp{30}, Timestamp{31}, Timestamp{40}, Timestamp{41}, 1)};
    write_mtp_csv(path, recs);
    EXPECT_EQ(read_mtp_csv(path), recs);
    std::filesystem::remove(path);
}

TEST(FrameStats, UniformImuSecond) {
    std::vector<InvocationRecord> t;
    for (int i = 0; i < 500; ++i) t.push_back(rec("imu", i, i * 2.0, 2.0, 2.0, Duration::millis(2)));
    const auto s = frame_stats(t, {{"imu", 500.0}}, Duration::seconds(1));
    ASSERT_EQ(s.size(), 1u);
    EXPECT_NEAR(s[0].mean_ms, 2.0, 1e-12);
    EXPECT_NEAR(s[0].std_ms, 0.0, 1e-12);
    EXPECT_NEAR(s[0].achieved_hz, 500.0, 1e-9);
    EXPECT_EQ(s[0].miss_fraction, 0.0);
}

TEST(FrameStats, AlternatingMissesHalf) {
    std::vector<InvocationRecord> t;
    const auto deadline = Duration::micros(8333);
    for (int i = 0; i < 100; ++i) t.push_back(rec("app", i, i * 20.0, i % 2 ? 15.0 : 5.0, 1.0, deadline));
    const auto s = frame_stats(t, {{"app", 120.0}, {"idle", 60.0}}, Duration::seconds(2));
    ASSERT_EQ(s.size(), 2u);
    const auto& app = s[0].name == "app" ? s[0] : s[1];
    const auto& idle = s[0].name == "app" ? s[1] : s[0];
    EXPECT_NEAR(app.miss_fraction, 0.5, 1e-12);
    EXPECT_NEAR(app.mean_ms, 10.0, 1e-9);
    EXPECT_NEAR(app.std_ms, 5.0, 1e-9);
    EXPECT_EQ(idle.invocations, 0u);
    EXPECT_FALSE(idle.note.empty());
    EXPECT_THROW(frame_stats({}, {}, Duration::seconds(1)), InputError);
    EXPECT_THROW(frame_stats(t, {}, Duration{}), InputError);
}

TEST(CpuAttribution, FractionsAndOrderInvariance) {
    std::vector<InvocationRecord> t{rec("a", 0, 0, 30, 30, Duration::seconds(1)),
                                    rec("b", 0, 0, 70, 70, Duration::seconds(1))};
    auto f = cpu_attribution(t);
    EXPECT_NEAR(f["a"], 0.3, 1e-12);
    EXPECT_NEAR(f["b"], 0.7, 1e-12);
    std::reverse(t.begin(), t.end());
    EXPECT_EQ(cpu_attribution(t), f);
    EXPECT_NEAR(cpu_attribution({t[0]})["b"], 1.0, 1e-12);
    std::vector<InvocationRecord> idle{rec("x", 0, 0, 1, 0, Duration::seconds(1)), rec("y", 0, 0, 1, 0, Duration::seconds(1))};
    const auto u = cpu_attribution(idle);
    EXPECT_NEAR(u.at("x") + u.at("y"), 1.0, 1e-9);
}

TEST(Ssim, IdenticalSymmetricAndBounded) {
    for (const auto& p : support::random_image_pairs(3)) {
        EXPECT_DOUBLE_EQ(ssim(p.a, p.a), 1.0);
        EXPECT_NEAR(ssim(p.a, p.b), ssim(p.b, p.a), 1e-12);
        EXPECT_LT(ssim(p.a, p.b), 1.0);
    }
    EXPECT_THROW(ssim(ImageU8(20, 20, 3), ImageU8(21, 20, 3)), DimensionError);
    EXPECT_THROW(ssim(ImageU8(8, 8, 1), ImageU8(8, 8, 1)), DimensionError);
}

TEST(Ssim, ConstantOffsetAndInverse) {
    ImageU8 a(32, 32, 1, 100), b(32, 32, 1, 101);
    EXPECT_GT(ssim(a, b), 0.99);
    // closed form for flat images: (2 mu_a mu_b + C1) / (mu_a^2 + mu_b^2 + C1)
    const double c1 = std::pow(0.01 * 255, 2);
    EXPECT_NEAR(ssim(a, b), (2 * 100.0 * 101 + c1) / (100.0 * 100 + 101.0 * 101 + c1), 1e-12);
    ImageU8 s(32, 32, 1), inv(32, 32, 1);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            s.at(x, y) = ((x / 3 + y / 3) % 2) ? 230 : 25;
            inv.at(x, y) = static_cast<std::uint8_t>(255 - s.at(x, y));
        }
    const double v = ssim(s, inv);
    EXPECT_LT(v, 0.0);
    EXPECT_NEAR(v, support::ssim_reference(s, inv), 1e-9);
    ImageScores scores;
    scores.ssim_raw = {v, 0.2};
    scores.flip = {0.5, 0.4};
    const QualityReport q = summarize_images(scores);
    EXPECT_EQ(q.ssim_clamped, 1u);
    EXPECT_NEAR(q.ssim.mean, 0.1, 1e-12);
}

TEST(Flip, IdenticalIsZeroAndBlackWhiteIsLarge) {
    for (const auto& p : support::random_image_pairs(3)) EXPECT_EQ(flip_mean(p.a, p.a), 0.0);
    ImageU8 black(32, 32, 3, 0), white(32, 32, 3, 255);
    const double e = flip_mean(black, white);
    EXPECT_GT(e, 0.9);
    EXPECT_NEAR(e, support::flip_reference(black, white), 1e-9);
    const auto r = flip(black, white);
    for (double v : r.error_map.data) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
    }
    EXPECT_THROW(flip(ImageU8(8, 8, 1), ImageU8(8, 8, 1)), DimensionError);
}

TEST(Flip, MonotoneUnderContrastSweep) {
    const auto e = support::flip_contrast_sweep();
    EXPECT_EQ(e.front(), 0.0);
    for (std::size_t i = 1; i < e.size(); ++i) EXPECT_GE(e[i], e[i - 1]);
    EXPECT_GT(e.back(), e[1]);
}

TEST(ImageMetrics, AgreeWithReferenceImplementations) {
    const auto r = support::metrics_vs_reference(10);
    EXPECT_LT(r.ssim_max_diff, 1e-3);
    EXPECT_LT(r.flip_max_diff, 1e-3);
}

TEST(Flip, PixelsPerDegreeMatters) {
    const auto p = support::random_image_pairs(1).front();
    EXPECT_NE(flip_mean(p.a, p.b, 67.0), flip_mean(p.a, p.b, 20.0));
    EXPECT_NEAR(flip_mean(p.a, p.b, 20.0), support::flip_reference(p.a, p.b, 20.0), 1e-3);
}

TEST(Alignment, IdentityOnEqualTrajectories) {
    const auto gt = support::sample_trajectory(support::wandering_spec(), 5, 30, PoseSource::ground_truth);
    const auto a = align_trajectories(gt, gt);
    EXPECT_TRUE(a.rotation.isIdentity(1e-9));
    EXPECT_LT(a.translation.norm(), 1e-9);
    EXPECT_FALSE(a.degenerate);
    const auto e = ate(gt, gt);
    EXPECT_EQ(e.translation_m, 0.0);
    EXPECT_EQ(e.rotation_deg, 0.0);
}

TEST(Alignment, RecoversKnownRigidMotion) {
    const auto c = support::known_rigid_alignment();
    EXPECT_LT(c.ate_m, 1e-9);
    EXPECT_LT(c.ate_deg, 1e-6);
    EXPECT_LT(c.rotation_error, 1e-9);
    EXPECT_LT(c.translation_error, 1e-9);
}

TEST(Alignment, OptimalUnderRandomPerturbations) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n(0.0, 0.02);
    const auto gt = support::sample_trajectory(support::wandering_spec(), 8, 30, PoseSource::ground_truth);
    Trajectory est = gt;
    for (auto& p : est) p.pose.position += Vec3(n(rng), n(rng), n(rng)) + Vec3(0.3, 0, 0);
    const auto a = align_trajectories(est, gt);
    const double best = ate(apply_alignment(a, est), gt).translation_m;
    for (int k = 0; k < 50; ++k) {
        Alignment b = a;
        b.rotation = exp_map(Vec3(n(rng), n(rng), n(rng)) * 0.05).toRotationMatrix() * a.rotation;
        b.translation += Vec3(n(rng), n(rng), n(rng)) * 0.05;
        EXPECT_GE(ate(apply_alignment(b, est), gt).translation_m, best - 1e-12);
    }
}

TEST(Alignment, CollinearIsFlagged) {
    Trajectory gt;
    for (int i = 0; i < 20; ++i) {
        PoseSample p;
        p.ts = Timestamp{i * 10'000'000LL};
        p.pose.position = Vec3(0.1 * i, 0.2 * i, 0.0);
        gt.push_back(p);
    }
    EXPECT_TRUE(align_trajectories(gt, gt).degenerate);
    Trajectory two(gt.begin(), gt.begin() + 2);
    EXPECT_THROW(align_trajectories(two, two), InputError);
}

TEST(Alignment, AssociationRespectsMaxGap) {
    const auto gt = support::sample_trajectory(support::wandering_spec(), 1, 30, PoseSource::ground_truth);
    Trajectory est = gt;
    for (auto& p : est) p.ts = p.ts + Duration::millis(3);
    EXPECT_EQ(associate(est, gt).pairs.size(), gt.size());
    for (auto& p : est) p.ts = p.ts + Duration::millis(3);  // 6 ms from the nearest, 27 ms from the next
    EXPECT_EQ(associate(est, gt).pairs.size(), 0u);
}

TEST(Ate, UniformOffsetWithoutAlignment) {
    const auto gt = support::sample_trajectory(support::wandering_spec(), 3, 30, PoseSource::ground_truth);
    Trajectory est = gt;
    for (auto& p : est) p.pose.position += Vec3(0.0, 0.1, 0.0);
    EXPECT_NEAR(ate(est, gt).translation_m, 0.1, 1e-12);
}

TEST(Rpe, ZerosOnIdentical) {
    const auto gt = support::sample_trajectory(support::wandering_spec(), 5, 30, PoseSource::ground_truth);
    const auto r = rpe(gt, gt, Duration::seconds(1));
    EXPECT_FALSE(r.translation_m.empty());
    EXPECT_EQ(r.translation.max, 0.0);
    EXPECT_LT(r.rotation.max, 1e-6);
    EXPECT_THROW(rpe(gt, gt, Duration::seconds(10)), InputError);
    EXPECT_THROW(rpe(gt, gt, Duration{}), InputError);
}

TEST(Rpe, ConstantDriftGivesRateTimesDelta) { EXPECT_NEAR(support::rpe_drift_ratio(), 1.0, 0.01); }

TEST(Rpe, InvariantToGlobalRigidTransform) {
    const auto gt = support::sample_trajectory(support::wandering_spec(), 6, 30, PoseSource::ground_truth);
    std::mt19937_64 rng(13);
    std::normal_distribution<double> n(0.0, 0.01);
    Trajectory est = gt;
    for (auto& p : est) p.pose.position += Vec3(n(rng), n(rng), n(rng));
    const Quat G = axis_angle(Vec3(1, 1, 0), 0.8);
    Trajectory moved = est;
    for (auto& p : moved) {
        p.pose.position = G * p.pose.position + Vec3(4, -1, 2);
        p.pose.orientation = G * p.pose.orientation;
    }
    const auto a = rpe(est, gt, Duration::millis(500));
    const auto b = rpe(moved, gt, Duration::millis(500));
    EXPECT_NEAR(a.translation.rmse, b.translation.rmse, 1e-9);
    EXPECT_NEAR(a.rotation.rmse, b.rotation.rmse, 1e-6);
}

TEST(Summary, Stats) {
    const auto s = summarize({3.0, 1.0, 2.0, 4.0});
    EXPECT_NEAR(s.mean, 2.5, 1e-12);
    EXPECT_NEAR(s.median, 2.5, 1e-12);
    EXPECT_NEAR(s.rmse, std::sqrt(7.5), 1e-12);
    EXPECT_EQ(s.max, 4.0);
    const std::vector<double> v{1, 3};
    EXPECT_NEAR(mean_std(v).std, 1.0, 1e-12);
}

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "support/session_cases.hpp"
#include "xrsim/perception/trajectory_io.hpp"

using namespace xrsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("xrsim_harness_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Config, DefaultsFollowTheTunedParameters) {
    const SessionConfig c;
    EXPECT_EQ(c.camera_rate_hz, 15);
    EXPECT_EQ(c.imu_rate_hz, 500);
    EXPECT_EQ(c.display_rate_hz, 120);
    EXPECT_EQ(c.audio_rate_hz, 48);
    EXPECT_EQ(c.audio_block, 1024);
    EXPECT_EQ(c.width, 2560);
    EXPECT_EQ(c.height, 1440);
    EXPECT_EQ(c.fov_deg, 90.0);
    EXPECT_EQ(c.duration_s, 10.0);
    EXPECT_EQ(c.clock, ClockMode::simulated);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, RoundTripIsIdempotent) {
    SessionConfig c;
    set_config_value(c, "imu_rate_hz", "400");
    set_config_value(c, "cost.application", "lognormal:4,0.3");
    set_config_value(c, "traj.radius", "0.75");
    set_config_value(c, "vio.latency_ms", "12.5");
    const auto text = serialize_config(c);
    const auto again = serialize_config(parse_config(text));
    EXPECT_EQ(text, again);
    const auto back = parse_config(text);
    EXPECT_EQ(back.imu_rate_hz, 400);
    EXPECT_EQ(back.costs.at("application"), CostModel::lognormal(4, 0.3));
    EXPECT_EQ(back.trajectory.radius, 0.75);
    EXPECT_EQ(back.vio.latency_ms, 12.5);
    for (const auto& key : config_keys()) EXPECT_NE(text.find(key + " ="), std::string::npos) << key;
}

TEST(Config, ParseErrors) {
    EXPECT_THROW(parse_config("no_such_key = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("seed = 1\nseed = 2\n"), ConfigError);
    EXPECT_THROW(parse_config("imu_rate_hz = fast\n"), ConfigError);
    EXPECT_THROW(parse_config("imu_rate_hz\n"), ConfigError);
    EXPECT_NO_THROW(parse_config("# comment only\n\nseed = 4  # trailing\n"));
    EXPECT_EQ(parse_config("seed = 4  # trailing\n").seed, 4u);
}

TEST(Config, RangesAreEnforced) {
    const std::vector<std::pair<std::string, std::string>> bad{
        {"camera_rate_hz", "10"},   {"imu_rate_hz", "900"},     {"display_rate_hz", "200"},
        {"audio_rate_hz", "120"},   {"audio_block", "4096"},    {"width", "3840"},
        {"fov_deg", "180"},         {"ambisonic_order", "4"},   {"duration_s", "0"},
        {"audio_zoom", "2"},        {"image_scale", "0"}};
    for (const auto& [k, v] : bad) {
        SessionConfig c;
        set_config_value(c, k, v);
        EXPECT_THROW(c.validate(), ConfigError) << k << "=" << v;
    }
    EXPECT_THROW(wire_pipelines(parse_config("display_rate_hz = 200\n")), ConfigError);
}

TEST(Wiring, EightPluginsAndTopics) {
    const auto p = wire_pipelines(support::schedule_only(SessionConfig{}));
    std::vector<std::string> names;
    for (const auto& d : p.runtime->plugins()) names.push_back(d.name);
    EXPECT_EQ(names, (std::vector<std::string>{"camera", "imu", "vio_proxy", "integrator", "application",
                                               "reprojection", "audio_encode", "audio_playback"}));
    EXPECT_EQ(topic_names().size(), 8u);
    EXPECT_EQ(p.runtime->switchboard().topic_names().size(), 8u);
}

TEST(Wiring, EdgesMatchTheDataflow) {
    const auto p = wire_pipelines(support::schedule_only(SessionConfig{}));
    auto find = [&](const std::string& n) -> const PluginDescriptor& {
        for (const auto& d : p.runtime->plugins())
            if (d.name == n) return d;
        throw std::runtime_error(n);
    };
    auto reads = [&](const std::string& n, const std::string& topic) {
        for (const auto& r : find(n).reads)
            if (r.topic == topic) return std::optional<ReadMode>(r.mode);
        return std::optional<ReadMode>();
    };
    auto trigger = [&](const std::string& n) {
        const auto* t = std::get_if<Triggered>(&find(n).mode);
        return t ? t->topic : std::string();
    };
    EXPECT_EQ(trigger("vio_proxy"), "camera");
    EXPECT_EQ(reads("vio_proxy", "camera"), ReadMode::sync);
    EXPECT_EQ(trigger("integrator"), "imu");
    EXPECT_EQ(reads("integrator", "imu"), ReadMode::sync);
    EXPECT_EQ(reads("integrator", "vio_pose"), ReadMode::async);
    for (const char* n : {"application", "reprojection", "audio_playback"})
        EXPECT_EQ(reads(n, "integrated_pose"), ReadMode::async) << n;
    EXPECT_EQ(reads("reprojection", "rendered_frame"), ReadMode::async);
    EXPECT_EQ(trigger("audio_playback"), "audio_in");
    EXPECT_EQ(reads("audio_playback", "audio_in"), ReadMode::sync);
}

TEST(Wiring, DeadlinesFromRates) {
    const auto d = plugin_deadlines(SessionConfig{});
    EXPECT_NEAR(d.at("vio_proxy").ms(), 66.667, 1e-3);
    EXPECT_NEAR(d.at("reprojection").ms(), 8.333, 1e-3);
    EXPECT_NEAR(d.at("integrator").ms(), 2.0, 1e-9);
    EXPECT_NEAR(d.at("audio_playback").ms(), 20.833, 1e-3);
}

TEST(Session, ZeroCostCountsAreExact) {
    const auto c = support::run_counts(support::schedule_only(support::zero_cost(SessionConfig{})));
    EXPECT_EQ(c.at("camera").invocations, 150u);
    EXPECT_EQ(c.at("vio_proxy").invocations, 150u);
    EXPECT_EQ(c.at("imu").invocations, 5000u);
    EXPECT_EQ(c.at("integrator").invocations, 5000u);
    EXPECT_EQ(c.at("reprojection").invocations, 1200u);
    EXPECT_EQ(c.at("application").invocations, 1200u);
    EXPECT_EQ(c.at("audio_encode").invocations, 480u);
    EXPECT_EQ(c.at("audio_playback").invocations, 480u);
    for (const auto& [n, k] : c) EXPECT_EQ(k.skips, 0u) << n;
}

TEST(Session, SlowReprojectionHalvesItsRate) {
    auto cfg = support::schedule_only(support::zero_cost(SessionConfig{}));
    cfg.costs["reprojection"] = CostModel::constant(12.0);
    const auto c = support::run_counts(cfg);
    EXPECT_EQ(c.at("reprojection").invocations, 600u);
    EXPECT_EQ(c.at("reprojection").skips, 600u);
    EXPECT_EQ(c.at("imu").invocations, 5000u);
}

TEST(Session, NoiselessRunTracksGroundTruth) {
    auto cfg = support::schedule_only(SessionConfig{});
    cfg.imu_noise = {0, 0};
    cfg.vio = VioConfig{25.0, 0, 0, 0, 0, 0.05};
    const auto dir = scratch("noiseless");
    const auto r = run_session(cfg, dir.string());
    EXPECT_TRUE(r.ok());
    EXPECT_LT(r.quality.ate.translation_m, 1e-3);
    EXPECT_LT(r.quality.ate.rotation_deg, 1e-2);
    EXPECT_GT(r.quality.ate.pairs, 4000u);
    fs::remove_all(dir);
}

TEST(Session, ReportIsCompleteAndReplayMatches) {
    auto cfg = support::schedule_only(SessionConfig{});
    cfg.duration_s = 3.0;
    const auto dir = scratch("replay");
    const auto r = run_session(cfg, dir.string());
    EXPECT_TRUE(r.ok());
    ASSERT_EQ(r.stats.size(), 8u);
    for (const auto& s : r.stats) {
        EXPECT_GT(s.invocations, 0u) << s.name;
        EXPECT_LE(s.achieved_hz, s.target_hz + 1e-9) << s.name;
    }
    for (const char* f : {"session.cfg", "trace.csv", "mtp.csv", "display.csv", "trajectory_est.csv",
                          "trajectory_gt.csv", "trajectory_vio.csv", "audio_out.wav", "report.json", "report.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    const auto json = nlohmann::json::parse(support::slurp(dir / "report.json"));
    EXPECT_TRUE(json.at("ok").get<bool>());
    EXPECT_EQ(json.at("components").size(), 8u);

    const auto first = report_json(evaluate_session(dir.string()));
    EXPECT_EQ(first, support::slurp(dir / "report.json"));
    EXPECT_EQ(first, report_json(evaluate_session(dir.string())));
    fs::remove_all(dir);
}

TEST(Session, SameSeedIsByteIdentical) {
    auto cfg = support::schedule_only(SessionConfig{});
    cfg.duration_s = 2.0;
    const auto a = scratch("det_a"), b = scratch("det_b");
    run_session(cfg, a.string());
    run_session(cfg, b.string());
    std::string diff;
    EXPECT_TRUE(support::same_tree(a, b, &diff)) << diff;
    cfg.seed = 2;
    const auto c = scratch("det_c");
    run_session(cfg, c.string());
    EXPECT_NE(support::slurp(a / "trajectory_est.csv"), support::slurp(c / "trajectory_est.csv"));
    for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST(Session, TruncatedTrajectoryIsFlagged) {
    auto cfg = support::schedule_only(SessionConfig{});
    cfg.duration_s = 2.0;
    const auto dir = scratch("truncated");
    run_session(cfg, dir.string());
    const auto path = dir / "trajectory_est.csv";
    auto text = support::slurp(path);
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os << text.substr(0, text.size() / 2 - 7);  // half the file, cut mid-row
    }
    const auto r = evaluate_session(dir.string());
    EXPECT_FALSE(r.flags.empty());
    bool mentions = false;
    for (const auto& f : r.flags) mentions = mentions || f.find("trajectory_est") != std::string::npos;
    EXPECT_TRUE(mentions);
    EXPECT_GT(r.quality.ate.pairs, 0u);
    fs::remove_all(dir);
}

TEST(Session, MissingInputsFailBeforeRunning) {
    auto cfg = support::schedule_only(SessionConfig{});
    cfg.hrtf_file = "/nonexistent/hrtf.txt";
    const auto dir = scratch("abort");
    EXPECT_THROW(run_session(cfg, dir.string()), Error);
    EXPECT_FALSE(fs::exists(dir / "trace.csv"));
    cfg = support::schedule_only(SessionConfig{});
    cfg.audio_source_wav = "/nonexistent/source.wav";
    EXPECT_THROW(run_session(cfg, dir.string()), Error);
    fs::remove_all(dir);
}

TEST(Session, MtpIdentityAndBound) {
    auto cfg = support::schedule_only(SessionConfig{});
    cfg.duration_s = 3.0;
    const auto dir = scratch("mtp");
    const auto r = run_session(cfg, dir.string());
    const auto recs = read_mtp_csv((dir / "mtp.csv").string());
    ASSERT_FALSE(recs.empty());
    for (const auto& m : recs) EXPECT_EQ(m.total(), m.imu_age + m.reprojection + m.swap);
    EXPECT_LE(r.quality.mtp.total_ms.mean, r.mtp_bound_ms);
    EXPECT_TRUE(r.invariants.at("mtp_identity"));
    fs::remove_all(dir);
}

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "xrsim/audio/ambisonics.hpp"
#include "xrsim/harness/config.hpp"
#include "xrsim/metrics/report.hpp"
#include "xrsim/metrics/timing.hpp"
#include "xrsim/perception/sensors.hpp"
#include "xrsim/runtime/runtime.hpp"
#include "xrsim/visual/render.hpp"

namespace xrsim {

/// Payload of the reprojected_frame topic.
struct ReprojectedFrame {
    ImageU8 image;      ///< warped to the predicted pose, before lens correction
    ImageU8 displayed;  ///< after distortion and chromatic-aberration correction
    Pose predicted;
    Timestamp display_ts;
    Timestamp imu_ts;  ///< IMU sample time of the newest pose used
    std::uint64_t render_seq = 0;
};

/// Names of the eight topics, in creation order.
const std::vector<std::string>& topic_names();

/// Deadline of each plugin, derived from the configured rates.
std::map<std::string, Duration> plugin_deadlines(const SessionConfig& cfg);
/// Target rate of each plugin (triggered plugins inherit their trigger's rate).
std::map<std::string, double> plugin_targets(const SessionConfig& cfg);

struct SessionData;

/// A wired runtime plus the state its plugins share with the session.
struct Pipeline {
    Pipeline();
    ~Pipeline();
    Pipeline(Pipeline&&) noexcept;
    Pipeline& operator=(Pipeline&&) noexcept;

    SessionConfig config;
    std::unique_ptr<Runtime> runtime;
    std::unique_ptr<SessionData> data;
};

/// Creates the topics and registers the plugins:
///   camera -> vio_proxy (sync)         imu -> integrator (sync)
///   vio_proxy -> integrator (async anchor)
///   integrator -> application, reprojection, audio_playback (async)
///   application -> reprojection (async)
///   audio_encode -> audio_playback (sync)
/// Throws ConfigError for an invalid config.
Pipeline wire_pipelines(const SessionConfig& cfg);

struct SessionReport {
    SessionConfig config;
    FrameStats stats;
    std::map<std::string, double> cpu;
    QualityReport quality;
    std::size_t frames_scored = 0;
    std::size_t mtp_frames = 0;
    double mtp_bound_ms = 0.0;  ///< IMU period + mean reprojection cost + display period
    std::vector<std::string> flags;
    std::map<std::string, bool> invariants;

    bool ok() const;
};

/// Runs a session and writes it to `out_dir`:
///   session.cfg trace.csv mtp.csv display.csv
///   trajectory_est.csv trajectory_gt.csv trajectory_vio.csv
///   frames/display_NNNNN.ppm frames/gt_NNNNN.ppm audio_out.wav
///   report.json report.csv
/// A plugin failure still flushes the partial trace before rethrowing.
SessionReport run_session(const SessionConfig& cfg, const std::string& out_dir);

/// Recomputes every metric from the files of a session directory.
SessionReport evaluate_session(const std::string& dir);

std::string report_json(const SessionReport& r);
std::string report_csv(const SessionReport& r);
void write_report(const std::string& dir, const SessionReport& r);

}  // namespace xrsim

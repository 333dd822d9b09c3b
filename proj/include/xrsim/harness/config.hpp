#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xrsim/perception/sensors.hpp"
#include "xrsim/perception/trajectory.hpp"
#include "xrsim/runtime/clock.hpp"
#include "xrsim/runtime/plugin.hpp"

namespace xrsim {

/// Everything a session needs. Text form is one `key = value` per line;
/// `#` starts a comment. Unknown keys are errors.
struct SessionConfig {
    ClockMode clock = ClockMode::simulated;
    double duration_s = 10.0;
    std::uint64_t seed = 1;

    std::int64_t camera_rate_hz = 15;
    std::int64_t imu_rate_hz = 500;
    std::int64_t display_rate_hz = 120;
    std::int64_t app_rate_hz = 120;
    std::int64_t audio_rate_hz = 48;  ///< blocks per second
    int audio_block = 1024;
    int audio_sample_rate = 48000;

    int width = 2560;
    int height = 1440;
    double fov_deg = 90.0;
    /// Frames are rendered and reprojected at width*scale x height*scale.
    double image_scale = 0.125;
    int camera_width = 128;
    int camera_height = 96;

    double lens_k1 = 0.22;
    double lens_k2 = 0.24;
    double lens_chroma = 0.03;  ///< green x(1-c), blue x(1+c)

    int ambisonic_order = 2;
    int hrtf_taps = 256;
    double audio_zoom = 0.0;
    std::string hrtf_file;         ///< empty: synthetic set
    std::string audio_source_wav;  ///< empty: synthetic tones only

    TrajectorySpec trajectory;
    ImuNoise imu_noise{0.002, 0.02};
    VioConfig vio{25.0, 0.005, 0.2, 0.01, 0.05, 0.05};

    std::map<std::string, CostModel> costs = default_costs();

    int quality_stride = 12;  ///< score every Nth vsync
    double flip_ppd = 67.0;
    double rpe_delta_s = 1.0;
    double assoc_max_gap_ms = 5.0;
    bool align_scale = false;

    static std::map<std::string, CostModel> default_costs();

    /// Throws ConfigError when a value is outside its permitted range.
    void validate() const;

    Duration duration() const { return Duration::millis(duration_s * 1e3); }
    int render_width() const;
    int render_height() const;
};

/// Plugin names in registration order.
const std::vector<std::string>& plugin_names();

SessionConfig parse_config(const std::string& text);
SessionConfig load_config(const std::string& path);
std::string serialize_config(const SessionConfig& cfg);
void save_config(const std::string& path, const SessionConfig& cfg);

/// Sets one key from its text form; same rules as the file parser.
void set_config_value(SessionConfig& cfg, const std::string& key, const std::string& value);
/// Every key accepted by the parser, in file order.
std::vector<std::string> config_keys();

}  // namespace xrsim

#include "xrsim/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "xrsim/common/text.hpp"
#include "xrsim/runtime/errors.hpp"

namespace xrsim {

namespace {

double to_double(const std::string& key, const std::string& v) {
    try {
        const double d = parse_double(v, key);
        if (!std::isfinite(d)) throw ConfigError("config: '" + key + "' must be finite");
        return d;
    } catch (const InputError&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    try {
        return parse_int64(v, key);
    } catch (const InputError&) {
        throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

struct Field {
    std::string key;
    std::function<void(SessionConfig&, const std::string&)> set;
    std::function<std::string(const SessionConfig&)> get;
};

template <typename Member>
Field dbl(std::string key, Member m) {
    return {key, [m, key](SessionConfig& c, const std::string& v) { std::invoke(m, c) = to_double(key, v); },
            [m](const SessionConfig& c) { return format_double(std::invoke(m, const_cast<SessionConfig&>(c))); }};
}

template <typename Member>
Field integer(std::string key, Member m) {
    return {key,
            [m, key](SessionConfig& c, const std::string& v) {
                using T = std::remove_reference_t<decltype(std::invoke(m, c))>;
                std::invoke(m, c) = static_cast<T>(to_int(key, v));
            },
            [m](const SessionConfig& c) { return std::to_string(std::invoke(m, const_cast<SessionConfig&>(c))); }};
}

template <typename Member>
Field text(std::string key, Member m) {
    return {key, [m](SessionConfig& c, const std::string& v) { std::invoke(m, c) = v; },
            [m](const SessionConfig& c) { return std::invoke(m, const_cast<SessionConfig&>(c)); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = [] {
        std::vector<Field> f;
        f.push_back({"clock",
                     [](SessionConfig& c, const std::string& v) {
                         if (v == "simulated") c.clock = ClockMode::simulated;
                         else if (v == "wall") c.clock = ClockMode::wall;
                         else throw ConfigError("config: clock must be simulated or wall");
                     },
                     [](const SessionConfig& c) {
                         return std::string(c.clock == ClockMode::simulated ? "simulated" : "wall");
                     }});
        f.push_back(dbl("duration_s", &SessionConfig::duration_s));
        f.push_back({"seed",
                     [](SessionConfig& c, const std::string& v) {
                         const auto s = to_int("seed", v);
                         if (s < 0) throw ConfigError("config: seed must be non-negative");
                         c.seed = static_cast<std::uint64_t>(s);
                     },
                     [](const SessionConfig& c) { return std::to_string(c.seed); }});
        f.push_back(integer("camera_rate_hz", &SessionConfig::camera_rate_hz));
        f.push_back(integer("imu_rate_hz", &SessionConfig::imu_rate_hz));
        f.push_back(integer("display_rate_hz", &SessionConfig::display_rate_hz));
        f.push_back(integer("app_rate_hz", &SessionConfig::app_rate_hz));
        f.push_back(integer("audio_rate_hz", &SessionConfig::audio_rate_hz));
        f.push_back(integer("audio_block", &SessionConfig::audio_block));
        f.push_back(integer("audio_sample_rate", &SessionConfig::audio_sample_rate));
        f.push_back(integer("width", &SessionConfig::width));
        f.push_back(integer("height", &SessionConfig::height));
        f.push_back(dbl("fov_deg", &SessionConfig::fov_deg));
        f.push_back(dbl("image_scale", &SessionConfig::image_scale));
        f.push_back(integer("camera_width", &SessionConfig::camera_width));
        f.push_back(integer("camera_height", &SessionConfig::camera_height));
        f.push_back(dbl("lens_k1", &SessionConfig::lens_k1));
        f.push_back(dbl("lens_k2", &SessionConfig::lens_k2));
        f.push_back(dbl("lens_chroma", &SessionConfig::lens_chroma));
        f.push_back(integer("ambisonic_order", &SessionConfig::ambisonic_order));
        f.push_back(integer("hrtf_taps", &SessionConfig::hrtf_taps));
        f.push_back(dbl("audio_zoom", &SessionConfig::audio_zoom));
        f.push_back(text("hrtf_file", &SessionConfig::hrtf_file));
        f.push_back(text("audio_source_wav", &SessionConfig::audio_source_wav));

        auto traj_field = [](std::string key, double TrajectorySpec::*m) {
            return dbl(std::move(key), [m](SessionConfig& c) -> double& { return c.trajectory.*m; });
        };
        f.push_back(traj_field("traj.radius", &TrajectorySpec::radius));
        f.push_back(traj_field("traj.angular_rate", &TrajectorySpec::angular_rate));
        f.push_back(traj_field("traj.height", &TrajectorySpec::height));
        f.push_back(traj_field("traj.bob_amplitude", &TrajectorySpec::bob_amplitude));
        f.push_back(traj_field("traj.bob_frequency", &TrajectorySpec::bob_frequency));
        f.push_back(traj_field("traj.yaw_offset", &TrajectorySpec::yaw_offset));
        f.push_back(traj_field("traj.yaw_rate", &TrajectorySpec::yaw_rate));
        f.push_back(traj_field("traj.yaw_amplitude", &TrajectorySpec::yaw_amplitude));
        f.push_back(traj_field("traj.yaw_frequency", &TrajectorySpec::yaw_frequency));
        f.push_back(traj_field("traj.pitch_amplitude", &TrajectorySpec::pitch_amplitude));
        f.push_back(traj_field("traj.pitch_frequency", &TrajectorySpec::pitch_frequency));

        f.push_back(dbl("imu.gyro_sigma", [](SessionConfig& c) -> double& { return c.imu_noise.gyro_sigma; }));
        f.push_back(dbl("imu.accel_sigma", [](SessionConfig& c) -> double& { return c.imu_noise.accel_sigma; }));
        f.push_back(dbl("vio.latency_ms", [](SessionConfig& c) -> double& { return c.vio.latency_ms; }));
        f.push_back(dbl("vio.pos_sigma", [](SessionConfig& c) -> double& { return c.vio.pos_sigma; }));
        f.push_back(dbl("vio.rot_sigma_deg", [](SessionConfig& c) -> double& { return c.vio.rot_sigma_deg; }));
        f.push_back(dbl("vio.drift_rate", [](SessionConfig& c) -> double& { return c.vio.drift_rate; }));
        f.push_back(
            dbl("vio.yaw_drift_deg_per_s", [](SessionConfig& c) -> double& { return c.vio.yaw_drift_deg_per_s; }));
        f.push_back(dbl("vio.heading_walk", [](SessionConfig& c) -> double& { return c.vio.heading_walk; }));

        for (const auto& name : plugin_names()) {
            if (name == "vio_proxy") continue;  // its cost is vio.latency_ms
            const std::string key = "cost." + name;
            f.push_back({key, [name](SessionConfig& c, const std::string& v) { c.costs[name] = CostModel::parse(v); },
                         [name](const SessionConfig& c) {
                             auto it = c.costs.find(name);
                             return it == c.costs.end() ? CostModel{}.to_string() : it->second.to_string();
                         }});
        }

        f.push_back(integer("quality_stride", &SessionConfig::quality_stride));
        f.push_back(dbl("flip_ppd", &SessionConfig::flip_ppd));
        f.push_back(dbl("rpe_delta_s", &SessionConfig::rpe_delta_s));
        f.push_back(dbl("assoc_max_gap_ms", &SessionConfig::assoc_max_gap_ms));
        f.push_back({"align_scale",
                     [](SessionConfig& c, const std::string& v) { c.align_scale = to_bool("align_scale", v); },
                     [](const SessionConfig& c) { return std::string(c.align_scale ? "true" : "false"); }});
        return f;
    }();
    return f;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
}

}  // namespace

const std::vector<std::string>& plugin_names() {
    static const std::vector<std::string> names{"camera",      "imu",          "vio_proxy",    "integrator",
                                                "application", "reprojection", "audio_encode", "audio_playback"};
    return names;
}

std::map<std::string, CostModel> SessionConfig::default_costs() {
    return {{"camera", CostModel::constant(1.0)},         {"imu", CostModel::constant(0.02)},
            {"integrator", CostModel::constant(0.2)},     {"application", CostModel::normal(5.0, 1.0)},
            {"reprojection", CostModel::constant(1.5)},   {"audio_encode", CostModel::constant(0.5)},
            {"audio_playback", CostModel::constant(2.0)}};
}

int SessionConfig::render_width() const { return std::max(16, static_cast<int>(std::lround(width * image_scale))); }
int SessionConfig::render_height() const { return std::max(16, static_cast<int>(std::lround(height * image_scale))); }

void SessionConfig::validate() const {
    require(duration_s > 0 && duration_s <= 3600, "duration_s must be in (0, 3600]");
    require(camera_rate_hz >= 15 && camera_rate_hz <= 100, "camera_rate_hz must be in [15, 100]");
    require(imu_rate_hz >= 1 && imu_rate_hz <= 800, "imu_rate_hz must be in [1, 800]");
    require(display_rate_hz >= 30 && display_rate_hz <= 144, "display_rate_hz must be in [30, 144]");
    require(app_rate_hz >= 1 && app_rate_hz <= 144, "app_rate_hz must be in [1, 144]");
    require(audio_rate_hz >= 48 && audio_rate_hz <= 96, "audio_rate_hz must be in [48, 96]");
    require(audio_block >= 256 && audio_block <= 2048, "audio_block must be in [256, 2048]");
    require(audio_sample_rate >= 8000 && audio_sample_rate <= 192000, "audio_sample_rate must be in [8000, 192000]");
    require(width >= 16 && width <= 2560 && height >= 16 && height <= 1440, "resolution must be within 2560x1440");
    require(fov_deg > 0 && fov_deg < 180, "fov_deg must be in (0, 180)");
    require(image_scale > 0 && image_scale <= 1, "image_scale must be in (0, 1]");
    require(camera_width >= 8 && camera_height >= 8, "camera image must be at least 8x8");
    require(lens_chroma >= 0 && lens_chroma < 0.5, "lens_chroma must be in [0, 0.5)");
    require(ambisonic_order >= 1 && ambisonic_order <= 3, "ambisonic_order must be in [1, 3]");
    require(hrtf_taps >= 1 && hrtf_taps <= 8192, "hrtf_taps must be in [1, 8192]");
    require(audio_zoom >= -1 && audio_zoom <= 1, "audio_zoom must be in [-1, 1]");
    require(imu_noise.gyro_sigma >= 0 && imu_noise.accel_sigma >= 0, "IMU noise must be non-negative");
    require(vio.latency_ms >= 0 && vio.pos_sigma >= 0 && vio.rot_sigma_deg >= 0 && vio.drift_rate >= 0 &&
                vio.heading_walk >= 0,
            "VIO knobs must be non-negative");
    require(quality_stride >= 1, "quality_stride must be >= 1");
    require(flip_ppd > 0, "flip_ppd must be positive");
    require(rpe_delta_s > 0, "rpe_delta_s must be positive");
    require(assoc_max_gap_ms > 0, "assoc_max_gap_ms must be positive");
    for (const auto& [name, cost] : costs) {
        bool known = false;
        for (const auto& n : plugin_names()) known |= n == name && n != "vio_proxy";
        require(known, "no cost key for plugin '" + name + "'");
    }
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.push_back(f.key);
    return keys;
}

void set_config_value(SessionConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& f : fields())
        if (f.key == key) {
            f.set(cfg, value);
            return;
        }
    throw ConfigError("config: unknown key '" + key + "'");
}

SessionConfig parse_config(const std::string& body) {
    SessionConfig cfg;
    std::istringstream is(body);
    std::string line;
    int lineno = 0;
    std::map<std::string, int> seen;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key(trim(t.substr(0, eq)));
        const std::string value(trim(t.substr(eq + 1)));
        if (seen.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": '" + key + "' already set on line " +
                              std::to_string(seen[key]));
        seen[key] = lineno;
        set_config_value(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

SessionConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const SessionConfig& cfg) {
    std::string out;
    for (const auto& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
    return out;
}

void save_config(const std::string& path, const SessionConfig& cfg) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    os << serialize_config(cfg);
}

}  // namespace xrsim

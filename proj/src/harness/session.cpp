#include "xrsim/harness/session.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>

#include <json.hpp>

#include "xrsim/audio/convolver.hpp"
#include "xrsim/audio/wav.hpp"
#include "xrsim/common/text.hpp"
#include "xrsim/metrics/image_metrics.hpp"
#include "xrsim/perception/integrator.hpp"
#include "xrsim/perception/trajectory_io.hpp"
#include "xrsim/runtime/trace.hpp"
#include "xrsim/visual/reproject.hpp"

namespace fs = std::filesystem;

namespace xrsim {

const std::vector<std::string>& topic_names() {
    static const std::vector<std::string> names{"camera",         "imu",           "vio_pose",
                                                "integrated_pose", "rendered_frame", "reprojected_frame",
                                                "audio_in",       "audio_out"};
    return names;
}

std::map<std::string, Duration> plugin_deadlines(const SessionConfig& cfg) {
    auto period = [](std::int64_t hz) { return Period::from_hz(hz).nominal(); };
    return {{"camera", period(cfg.camera_rate_hz)},
            {"imu", period(cfg.imu_rate_hz)},
            {"vio_proxy", period(cfg.camera_rate_hz)},
            {"integrator", period(cfg.imu_rate_hz)},
            {"application", period(cfg.app_rate_hz)},
            {"reprojection", period(cfg.display_rate_hz)},
            {"audio_encode", period(cfg.audio_rate_hz)},
            {"audio_playback", period(cfg.audio_rate_hz)}};
}

std::map<std::string, double> plugin_targets(const SessionConfig& cfg) {
    const auto hz = [](std::int64_t r) { return static_cast<double>(r); };
    return {{"camera", hz(cfg.camera_rate_hz)},       {"imu", hz(cfg.imu_rate_hz)},
            {"vio_proxy", hz(cfg.camera_rate_hz)},    {"integrator", hz(cfg.imu_rate_hz)},
            {"application", hz(cfg.app_rate_hz)},     {"reprojection", hz(cfg.display_rate_hz)},
            {"audio_encode", hz(cfg.audio_rate_hz)},  {"audio_playback", hz(cfg.audio_rate_hz)}};
}

// ---------------------------------------------------------------------------
// Shared plugin state

struct SessionData {
    SessionConfig cfg;
    Period camera_p = Period::from_hz(15);
    Period imu_p = Period::from_hz(500);
    Period app_p = Period::from_hz(120);
    Period display_p = Period::from_hz(120);
    Period audio_p = Period::from_hz(48);

    CameraModel cam;
    Scene scene;
    DistortionMesh lens;

    Topic<CameraFrame> camera;
    Topic<ImuSample> imu;
    Topic<PoseSample> vio_pose;
    Topic<PoseSample> integrated_pose;
    Topic<RenderedFrame> rendered_frame;
    Topic<ReprojectedFrame> reprojected_frame;
    Topic<AmbisonicBlock> audio_in;
    Topic<AudioBlock> audio_out;

    // vio_proxy context
    std::unique_ptr<VioProxy> vio;
    // integrator context
    std::deque<ImuSample> imu_buffer;
    PoseSample anchor;
    // reprojection context
    std::deque<PoseSample> history;
    // audio contexts
    std::vector<SourceSpec> sources;
    std::unique_ptr<PsychoacousticFilter> psycho;
    std::unique_ptr<Binauralizer> binaural;

    // collected under mu
    std::mutex mu;
    std::vector<PoseSample> est, gt, vio_traj;
    std::vector<MtpRecord> mtp;
    std::map<std::uint64_t, std::shared_ptr<const ReprojectedFrame>> inflight;
    struct Shown {
        std::uint64_t seq;
        Timestamp at;
    };
    std::vector<Shown> shown;
    std::shared_ptr<const ReprojectedFrame> on_screen;
    Timestamp on_screen_since;
    std::vector<std::pair<std::int64_t, std::shared_ptr<const ReprojectedFrame>>> samples;
    std::vector<std::vector<double>> audio_out_samples{2};
    std::size_t zoom_clamped = 0;

    // Frames stay on screen until the next one arrives; vsyncs covered in
    // [on_screen_since, until) that are scored get the frame on screen.
    void close_interval(Timestamp until) {
        if (!on_screen) return;
        for (std::int64_t j = display_p.first_slot_at_or_after(on_screen_since); display_p.slot(j) < until; ++j)
            if (j % cfg.quality_stride == 0) samples.emplace_back(j, on_screen);
    }

    void show(std::shared_ptr<const ReprojectedFrame> f, std::uint64_t seq, Timestamp pixels) {
        if (on_screen && pixels <= on_screen_since) return;
        close_interval(pixels);
        on_screen = std::move(f);
        on_screen_since = pixels;
        shown.push_back({seq, pixels});
    }
};

Pipeline::Pipeline() = default;
Pipeline::~Pipeline() = default;
Pipeline::Pipeline(Pipeline&&) noexcept = default;
Pipeline& Pipeline::operator=(Pipeline&&) noexcept = default;

namespace {

CostModel cost_of(const SessionConfig& cfg, const std::string& name) {
    auto it = cfg.costs.find(name);
    return it == cfg.costs.end() ? CostModel{} : it->second;
}

std::array<RadialCoeffs, 3> lens_coeffs(const SessionConfig& cfg) {
    const RadialCoeffs red{cfg.lens_k1, cfg.lens_k2};
    const double g = 1.0 - cfg.lens_chroma, b = 1.0 + cfg.lens_chroma;
    return {red, RadialCoeffs{red.k1 * g, red.k2 * g}, RadialCoeffs{red.k1 * b, red.k2 * b}};
}

Vec3 direction(double azimuth_deg, double elevation_deg) {
    const double az = deg_to_rad(azimuth_deg), el = deg_to_rad(elevation_deg);
    return Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
}

std::vector<SourceSpec> make_sources(const SessionConfig& cfg) {
    const int n = 2 * cfg.audio_sample_rate;
    std::vector<std::int16_t> tone(n), warble(n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / cfg.audio_sample_rate;
        tone[i] = static_cast<std::int16_t>(std::lround(8000.0 * std::sin(2 * std::numbers::pi * 440.0 * t)));
        const double am = 0.5 + 0.5 * std::sin(2 * std::numbers::pi * 3.0 * t);
        warble[i] = static_cast<std::int16_t>(std::lround(6000.0 * am * std::sin(2 * std::numbers::pi * 660.0 * t)));
    }
    std::vector<SourceSpec> s;
    if (!cfg.audio_source_wav.empty()) {
        const auto wav = read_wav(cfg.audio_source_wav);
        if (wav.sample_rate != cfg.audio_sample_rate)
            throw ConfigError("audio_source_wav: sample rate " + std::to_string(wav.sample_rate) +
                              " does not match audio_sample_rate");
        std::vector<std::int16_t> mono;
        for (std::size_t i = 0; i < wav.samples.size(); i += wav.channels) mono.push_back(wav.samples[i]);
        if (mono.empty()) throw ConfigError("audio_source_wav: no samples");
        s.push_back({std::move(mono), direction(30, 0), 1.0});
    } else {
        s.push_back({std::move(tone), direction(30, 0), 1.0});
    }
    s.push_back({std::move(warble), direction(-110, 20), 1.0});
    return s;
}

}  // namespace

Pipeline wire_pipelines(const SessionConfig& cfg) {
    cfg.validate();
    Pipeline p;
    p.config = cfg;
    p.data = std::make_unique<SessionData>();
    auto& d = *p.data;
    d.cfg = cfg;
    d.camera_p = Period::from_hz(cfg.camera_rate_hz);
    d.imu_p = Period::from_hz(cfg.imu_rate_hz);
    d.app_p = Period::from_hz(cfg.app_rate_hz);
    d.display_p = Period::from_hz(cfg.display_rate_hz);
    d.audio_p = Period::from_hz(cfg.audio_rate_hz);
    d.cam = CameraModel::from_fov(cfg.render_width(), cfg.render_height(), cfg.fov_deg);
    d.scene = Scene::generate(cfg.seed);
    d.lens = build_distortion_mesh(d.cam, lens_coeffs(cfg));
    d.vio = std::make_unique<VioProxy>(cfg.vio, plugin_seed(cfg.seed, 1000));
    d.anchor = ground_truth_pose(cfg.trajectory, Timestamp{});
    d.sources = make_sources(cfg);
    const HrtfSet hrtf = cfg.hrtf_file.empty()
                             ? synthetic_hrtf(cfg.ambisonic_order, cfg.audio_sample_rate, cfg.hrtf_taps)
                             : load_hrtf(cfg.hrtf_file);
    if (hrtf.sample_rate != cfg.audio_sample_rate) throw ConfigError("hrtf: sample rate does not match the session");
    d.psycho = std::make_unique<PsychoacousticFilter>(PsychoacousticFilter::max_re_filters(cfg.ambisonic_order),
                                                      cfg.audio_block);
    d.binaural = std::make_unique<Binauralizer>(hrtf, cfg.ambisonic_order, cfg.audio_block, cfg.audio_sample_rate);

    auto sb = std::make_shared<Switchboard>(cfg.clock == ClockMode::simulated ? OverflowPolicy::error
                                                                              : OverflowPolicy::drop_oldest);
    d.camera = sb->create_topic<CameraFrame>("camera");
    d.imu = sb->create_topic<ImuSample>("imu");
    d.vio_pose = sb->create_topic<PoseSample>("vio_pose");
    d.integrated_pose = sb->create_topic<PoseSample>("integrated_pose");
    d.rendered_frame = sb->create_topic<RenderedFrame>("rendered_frame");
    d.reprojected_frame = sb->create_topic<ReprojectedFrame>("reprojected_frame");
    d.audio_in = sb->create_topic<AmbisonicBlock>("audio_in");
    d.audio_out = sb->create_topic<AudioBlock>("audio_out");

    p.runtime = std::make_unique<Runtime>(sb);
    auto& rt = *p.runtime;
    const auto deadlines = plugin_deadlines(cfg);
    SessionData* D = &d;

    {
        PluginDescriptor pd;
        pd.name = "camera";
        pd.mode = Periodic{d.camera_p};
        pd.deadline = deadlines.at(pd.name);
        pd.writes = {"camera"};
        pd.cost = cost_of(cfg, pd.name);
        pd.callback = [D](InvocationContext& ctx) {
            const Timestamp ts = align_to_period(ctx.now(), D->imu_p);
            const auto gt = ground_truth_pose(D->cfg.trajectory, ts);
            ctx.publish(D->camera,
                        make_camera_frame(D->cfg.seed, gt.pose, ts, D->cfg.camera_width, D->cfg.camera_height), ts);
        };
        rt.register_plugin(std::move(pd));
    }
    {
        PluginDescriptor pd;
        pd.name = "imu";
        pd.mode = Periodic{d.imu_p};
        pd.deadline = deadlines.at(pd.name);
        pd.writes = {"imu"};
        pd.cost = cost_of(cfg, pd.name);
        pd.callback = [D](InvocationContext& ctx) {
            ctx.publish(D->imu, sample_imu(D->cfg.trajectory, ctx.now(), D->cfg.imu_noise, ctx.rng()), ctx.now());
        };
        rt.register_plugin(std::move(pd));
    }
    {
        PluginDescriptor pd;
        pd.name = "vio_proxy";
        pd.mode = Triggered{"camera"};
        pd.deadline = deadlines.at(pd.name);
        pd.reads = {{"camera", ReadMode::sync}};
        pd.writes = {"vio_pose"};
        pd.cost = CostModel::constant(cfg.vio.latency_ms);
        pd.callback = [D](InvocationContext& ctx) {
            const auto frame = ctx.input<CameraFrame>();
            const auto gt = ground_truth_pose(D->cfg.trajectory, frame->ts);
            auto est = D->vio->update(*frame, gt);
            ctx.set_cost(D->vio->latency());
            {
                std::lock_guard lk(D->mu);
                D->vio_traj.push_back(est);
            }
            ctx.publish(D->vio_pose, std::move(est), frame->ts);
        };
        rt.register_plugin(std::move(pd));
    }
    {
        PluginDescriptor pd;
        pd.name = "integrator";
        pd.mode = Triggered{"imu"};
        pd.deadline = deadlines.at(pd.name);
        pd.reads = {{"imu", ReadMode::sync}, {"vio_pose", ReadMode::async}};
        pd.writes = {"integrated_pose"};
        pd.cost = cost_of(cfg, pd.name);
        pd.callback = [D](InvocationContext& ctx) {
            const auto sample = ctx.input<ImuSample>();
            auto& buf = D->imu_buffer;
            if (!buf.empty() && sample->ts <= buf.back().ts) return;
            buf.push_back(*sample);
            // adopt a newer anchor only if the buffer still covers it
            if (auto a = ctx.read_latest(D->vio_pose);
                a && a->ts > D->anchor.ts && a->ts <= sample->ts && a->ts >= buf.front().ts)
                D->anchor = **a;
            while (buf.size() > 1 && buf[1].ts <= D->anchor.ts) buf.pop_front();
            std::vector<ImuSample> window(buf.begin(), buf.end());
            auto pose = rk4_integrate(D->anchor, window, sample->ts, D->cfg.trajectory.gravity);
            {
                std::lock_guard lk(D->mu);
                D->est.push_back(pose);
                D->gt.push_back(ground_truth_pose(D->cfg.trajectory, sample->ts));
            }
            ctx.publish(D->integrated_pose, std::move(pose), sample->ts);
        };
        rt.register_plugin(std::move(pd));
    }
    {
        PluginDescriptor pd;
        pd.name = "application";
        pd.mode = Periodic{d.app_p};
        pd.deadline = deadlines.at(pd.name);
        pd.reads = {{"integrated_pose", ReadMode::async}};
        pd.writes = {"rendered_frame"};
        pd.cost = cost_of(cfg, pd.name);
        pd.callback = [D](InvocationContext& ctx) {
            const auto pose = ctx.read_latest(D->integrated_pose);
            if (!pose) return;
            auto frame = render_scene(D->scene, (*pose)->pose, D->cam);
            frame.submit_ts = ctx.now() + ctx.cost();
            const Timestamp ts = frame.submit_ts;
            ctx.publish(D->rendered_frame, std::move(frame), ts);
        };
        rt.register_plugin(std::move(pd));
    }
    {
        PluginDescriptor pd;
        pd.name = "reprojection";
        pd.mode = Periodic{d.display_p};
        pd.deadline = deadlines.at(pd.name);
        pd.reads = {{"rendered_frame", ReadMode::async}, {"integrated_pose", ReadMode::async}};
        pd.writes = {"reprojected_frame"};
        pd.cost = cost_of(cfg, pd.name);
        pd.callback = [D](InvocationContext& ctx) {
            if (auto pose = ctx.read_latest(D->integrated_pose);
                pose && (D->history.empty() || D->history.back().ts < pose->ts)) {
                D->history.push_back(**pose);
                while (D->history.size() > 5) D->history.pop_front();
            }
            const auto frame = ctx.read_latest(D->rendered_frame);
            if (!frame || D->history.empty()) return;
            const std::vector<PoseSample> hist(D->history.begin(), D->history.end());
            const Timestamp display_ts = next_vsync(ctx.now() + ctx.cost(), D->display_p);
            const auto pred = predict_pose(hist, display_ts);
            auto out = std::make_shared<ReprojectedFrame>();
            out->image = reproject(**frame, pred.pose, D->cam);
            out->displayed = apply_distortion(out->image, D->lens);
            out->predicted = pred.pose;
            out->display_ts = display_ts;
            out->imu_ts = hist.back().ts;
            out->render_seq = frame->seq;
            {
                std::lock_guard lk(D->mu);
                D->inflight[ctx.seq()] = out;
            }
            ctx.publish_shared(D->reprojected_frame, std::shared_ptr<const ReprojectedFrame>(out), display_ts);
        };
        pd.on_complete = [D](const InvocationRecord& rec) {
            std::lock_guard lk(D->mu);
            auto it = D->inflight.find(rec.seq);
            if (it == D->inflight.end()) return;
            auto f = std::move(it->second);
            D->inflight.erase(it);
            const Timestamp pixels = next_vsync(rec.end, D->display_p);
            D->mtp.push_back(record_mtp(f->imu_ts, rec.start, rec.end, pixels, rec.seq));
            D->show(std::move(f), rec.seq, pixels);
        };
        rt.register_plugin(std::move(pd));
    }
    {
        PluginDescriptor pd;
        pd.name = "audio_encode";
        pd.mode = Periodic{d.audio_p};
        pd.deadline = deadlines.at(pd.name);
        pd.writes = {"audio_in"};
        pd.cost = cost_of(cfg, pd.name);
        pd.callback = [D](InvocationContext& ctx) {
            auto block = encode(D->sources, D->cfg.ambisonic_order, ctx.seq(), D->cfg.audio_block,
                                D->cfg.audio_sample_rate);
            block.ts = ctx.now();
            ctx.publish(D->audio_in, std::move(block), ctx.now());
        };
        rt.register_plugin(std::move(pd));
    }
    {
        PluginDescriptor pd;
        pd.name = "audio_playback";
        pd.mode = Triggered{"audio_in"};
        pd.deadline = deadlines.at(pd.name);
        pd.reads = {{"audio_in", ReadMode::sync}, {"integrated_pose", ReadMode::async}};
        pd.writes = {"audio_out"};
        pd.cost = cost_of(cfg, pd.name);
        pd.callback = [D](InvocationContext& ctx) {
            const auto in = ctx.input<AmbisonicBlock>();
            const auto pose = ctx.read_latest(D->integrated_pose);
            const Quat q = pose ? (*pose)->pose.orientation : Quat::Identity();
            auto field = D->psycho->process(*in);
            field = rotate_soundfield(field, q);
            auto zoomed = zoom_soundfield(field, D->cfg.audio_zoom);
            auto stereo = D->binaural->process(zoomed.block);
            stereo.ts = in->ts;
            {
                std::lock_guard lk(D->mu);
                D->zoom_clamped += zoomed.clamped;
                for (int c = 0; c < 2; ++c) {
                    auto ch = stereo.channel(c);
                    D->audio_out_samples[c].insert(D->audio_out_samples[c].end(), ch.begin(), ch.end());
                }
            }
            ctx.publish(D->audio_out, std::move(stereo), in->ts);
        };
        rt.register_plugin(std::move(pd));
    }
    rt.check_acyclic();
    return p;
}

// ---------------------------------------------------------------------------
// Persisting a session

namespace {

std::string frame_name(const char* kind, std::int64_t j) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "frames/%s_%05lld.ppm", kind, static_cast<long long>(j));
    return buf;
}

constexpr const char* kDisplayHeader = "vsync,ts_ns,frame_seq,repeat,scored";

void write_display_csv(const std::string& path, const SessionData& d, Timestamp horizon,
                       const std::vector<std::int64_t>& scored) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    os << kDisplayHeader << '\n';
    std::size_t k = 0, s = 0;
    std::int64_t prev = -1;
    for (std::int64_t j = 0; d.display_p.slot(j) < horizon; ++j) {
        const Timestamp t = d.display_p.slot(j);
        while (k < d.shown.size() && d.shown[k].at <= t) ++k;
        const std::int64_t seq = k == 0 ? -1 : static_cast<std::int64_t>(d.shown[k - 1].seq);
        while (s < scored.size() && scored[s] < j) ++s;
        const bool is_scored = s < scored.size() && scored[s] == j;
        os << j << ',' << t.ns << ',' << seq << ',' << (seq >= 0 && seq == prev ? 1 : 0) << ',' << (is_scored ? 1 : 0)
           << '\n';
        prev = seq;
    }
}

struct DisplayRow {
    std::int64_t vsync = 0;
    Timestamp ts;
    std::int64_t frame_seq = -1;
    bool repeat = false;
    bool scored = false;
};

std::vector<DisplayRow> read_display_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || trim(line) != kDisplayHeader) throw InputError("'" + path + "': wrong header");
    std::vector<DisplayRow> rows;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        if (is.eof()) break;  // unterminated final line
        const auto f = split(line, ',');
        if (f.size() != 5) throw InputError("'" + path + "': expected 5 fields");
        DisplayRow r;
        r.vsync = parse_int64(f[0], path);
        r.ts.ns = parse_int64(f[1], path);
        r.frame_seq = parse_int64(f[2], path);
        r.repeat = parse_int64(f[3], path) != 0;
        r.scored = parse_int64(f[4], path) != 0;
        rows.push_back(r);
    }
    return rows;
}

void persist(const Pipeline& p, const std::vector<InvocationRecord>& trace, const std::string& dir) {
    auto& d = *p.data;
    const Timestamp horizon = Timestamp{} + d.cfg.duration();
    fs::create_directories(fs::path(dir) / "frames");
    save_config((fs::path(dir) / "session.cfg").string(), d.cfg);
    write_trace_csv((fs::path(dir) / "trace.csv").string(), trace);

    std::vector<MtpRecord> mtp = d.mtp;
    std::erase_if(mtp, [&](const MtpRecord& r) { return r.ts >= horizon; });
    write_mtp_csv((fs::path(dir) / "mtp.csv").string(), mtp);

    write_trajectory_csv((fs::path(dir) / "trajectory_est.csv").string(), d.est);
    write_trajectory_csv((fs::path(dir) / "trajectory_gt.csv").string(), d.gt);
    write_trajectory_csv((fs::path(dir) / "trajectory_vio.csv").string(), d.vio_traj);

    std::vector<std::int64_t> scored;
    for (const auto& [j, frame] : d.samples) {
        const Timestamp t = d.display_p.slot(j);
        if (t >= horizon) continue;
        const auto gt = ground_truth_pose(d.cfg.trajectory, t);
        write_ppm((fs::path(dir) / frame_name("display", j)).string(), frame->image);
        write_ppm((fs::path(dir) / frame_name("gt", j)).string(), render_scene(d.scene, gt.pose, d.cam).image);
        scored.push_back(j);
    }
    write_display_csv((fs::path(dir) / "display.csv").string(), d, horizon, scored);

    WavData wav;
    wav.sample_rate = d.cfg.audio_sample_rate;
    wav.channels = 2;
    wav.samples = to_pcm16_interleaved(d.audio_out_samples);
    write_wav((fs::path(dir) / "audio_out.wav").string(), wav);
}

}  // namespace

SessionReport run_session(const SessionConfig& cfg, const std::string& out_dir) {
    Pipeline p = wire_pipelines(cfg);
    Clock clock = cfg.clock == ClockMode::simulated ? Clock::simulated() : Clock::wall();
    std::vector<InvocationRecord> trace;
    try {
        trace = p.runtime->run(clock, cfg.duration(), cfg.seed);
    } catch (const RunAborted& e) {
        fs::create_directories(out_dir);
        write_trace_csv((fs::path(out_dir) / "trace.csv").string(), e.partial_trace);
        throw;
    }
    {
        std::lock_guard lk(p.data->mu);
        p.data->close_interval(Timestamp{} + cfg.duration());
    }
    persist(p, trace, out_dir);
    auto report = evaluate_session(out_dir);
    write_report(out_dir, report);
    return report;
}

// ---------------------------------------------------------------------------
// Evaluation

bool SessionReport::ok() const {
    for (const auto& [name, v] : invariants)
        if (!v) return false;
    return true;
}

SessionReport evaluate_session(const std::string& dir) {
    const fs::path root(dir);
    SessionReport r;
    r.config = load_config((root / "session.cfg").string());
    const auto& cfg = r.config;
    const Duration duration = cfg.duration();
    const auto deadlines = plugin_deadlines(cfg);

    // timing
    const auto trace = read_trace_csv((root / "trace.csv").string());
    bool bookkeeping = true;
    for (const auto& rec : trace) {
        auto it = deadlines.find(rec.plugin);
        if (it == deadlines.end()) {
            bookkeeping = false;
            continue;
        }
        if (rec.skipped) bookkeeping &= rec.start == rec.end;
        else bookkeeping &= rec.end >= rec.start && rec.deadline_met == (rec.wall() <= it->second);
    }
    r.invariants["deadline_bookkeeping"] = bookkeeping;
    if (trace.empty()) {
        r.flags.push_back("empty trace");
        r.invariants["report_complete"] = false;
    } else {
        r.stats = frame_stats(trace, plugin_targets(cfg), duration);
        r.cpu = cpu_attribution(trace);
        const auto& names = plugin_names();
        auto rank = [&](const ComponentStats& s) {
            return std::find(names.begin(), names.end(), s.name) - names.begin();
        };
        std::stable_sort(r.stats.begin(), r.stats.end(),
                         [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
        bool complete = true;
        for (const auto& name : plugin_names()) {
            auto it = std::find_if(r.stats.begin(), r.stats.end(), [&](const auto& s) { return s.name == name; });
            complete &= it != r.stats.end() && (it->invocations > 0 || !it->note.empty());
        }
        r.invariants["report_complete"] = complete;
        if (cfg.clock == ClockMode::simulated) {
            bool capped = true;
            for (const auto& s : r.stats) capped &= s.achieved_hz <= s.target_hz + 1e-9;
            r.invariants["rate_capped"] = capped;
        }
    }

    // motion to photon
    const auto mtp = read_mtp_csv((root / "mtp.csv").string());
    bool identity = true;
    for (const auto& m : mtp)
        identity &= m.imu_age.ns >= 0 && m.reprojection.ns >= 0 && m.swap.ns >= 0 &&
                    m.total().ns == m.imu_age.ns + m.reprojection.ns + m.swap.ns;
    r.invariants["mtp_identity"] = identity;
    r.mtp_frames = mtp.size();
    double reproj_ms = 0.0;
    for (const auto& s : r.stats)
        if (s.name == "reprojection") reproj_ms = s.mean_ms;
    r.mtp_bound_ms = Period::from_hz(cfg.imu_rate_hz).nominal().ms() + reproj_ms +
                     Period::from_hz(cfg.display_rate_hz).nominal().ms();

    // images
    ImageScores scores;
    for (const auto& row : read_display_csv((root / "display.csv").string())) {
        if (!row.scored) continue;
        const auto shown = root / frame_name("display", row.vsync);
        const auto truth = root / frame_name("gt", row.vsync);
        if (!fs::exists(shown) || !fs::exists(truth)) {
            r.flags.push_back("missing frame " + std::to_string(row.vsync));
            continue;
        }
        const auto a = read_ppm(truth.string());
        const auto b = read_ppm(shown.string());
        scores.ssim_raw.push_back(ssim(a, b));
        scores.flip.push_back(flip_mean(a, b, cfg.flip_ppd));
    }
    r.quality = summarize_images(scores);
    r.frames_scored = scores.ssim_raw.size();
    if (r.frames_scored == 0) r.flags.push_back("no frames scored");
    r.quality.mtp = summarize_mtp(mtp);

    // pose
    bool est_cut = false, gt_cut = false;
    const auto est = read_trajectory_csv((root / "trajectory_est.csv").string(), PoseSource::integrator, &est_cut);
    const auto gt = read_trajectory_csv((root / "trajectory_gt.csv").string(), PoseSource::ground_truth, &gt_cut);
    if (est_cut) r.flags.push_back("trajectory_est truncated");
    if (gt_cut) r.flags.push_back("trajectory_gt truncated");
    const Timestamp expected_end = Timestamp{} + duration - Period::from_hz(cfg.imu_rate_hz).nominal() * 2;
    if (!est.empty() && est.back().ts < expected_end) r.flags.push_back("trajectory_est ends early");
    const Duration gap = Duration::millis(cfg.assoc_max_gap_ms);
    try {
        r.quality.alignment = align_trajectories(est, gt, cfg.align_scale, gap);
        if (r.quality.alignment.degenerate) r.flags.push_back("trajectory alignment degenerate");
        r.quality.ate = ate(apply_alignment(r.quality.alignment, est), gt, gap);
    } catch (const InputError& e) {
        r.flags.push_back(std::string("ate skipped: ") + e.what());
    }
    r.quality.rpe_delta_s = cfg.rpe_delta_s;
    try {
        const auto rp = rpe(est, gt, Duration::millis(cfg.rpe_delta_s * 1e3), gap);
        r.quality.rpe_pairs = rp.translation_m.size();
        r.quality.rpe_translation = rp.translation;
        r.quality.rpe_rotation = rp.rotation;
    } catch (const InputError& e) {
        r.flags.push_back(std::string("rpe skipped: ") + e.what());
    }
    return r;
}

// ---------------------------------------------------------------------------
// Report output

namespace {

using ojson = nlohmann::ordered_json;

ojson to_json(const MeanStd& m) { return ojson{{"mean", m.mean}, {"std", m.std}, {"count", m.count}}; }
ojson to_json(const ErrorStats& e) {
    return ojson{{"mean", e.mean}, {"rmse", e.rmse}, {"median", e.median}, {"max", e.max}, {"std", e.std}};
}

ojson build_json(const SessionReport& r) {
    ojson j;
    ojson cfg = ojson::object();
    for (const auto& line : split(serialize_config(r.config), '\n')) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["config"] = cfg;

    ojson comps = ojson::array();
    for (const auto& s : r.stats) {
        ojson c{{"name", s.name},
                {"target_hz", s.target_hz},
                {"achieved_hz", s.achieved_hz},
                {"invocations", s.invocations},
                {"skips", s.skips},
                {"mean_ms", s.mean_ms},
                {"std_ms", s.std_ms},
                {"miss_fraction", s.miss_fraction}};
        auto it = r.cpu.find(s.name);
        c["cpu_fraction"] = it == r.cpu.end() ? 0.0 : it->second;
        if (!s.note.empty()) c["note"] = s.note;
        comps.push_back(c);
    }
    j["components"] = comps;

    const auto& m = r.quality.mtp;
    j["mtp"] = ojson{{"frames", r.mtp_frames},
                     {"total_ms", to_json(m.total_ms)},
                     {"imu_age_ms", to_json(m.imu_age_ms)},
                     {"reprojection_ms", to_json(m.reprojection_ms)},
                     {"swap_ms", to_json(m.swap_ms)},
                     {"max_ms", m.max_ms},
                     {"bound_ms", r.mtp_bound_ms},
                     {"vr_target_ms", kMtpTargetVrMs},
                     {"ar_target_ms", kMtpTargetArMs},
                     {"within_vr", m.within_vr},
                     {"within_ar", m.within_ar}};

    const auto& q = r.quality;
    j["image"] = ojson{{"frames", r.frames_scored},
                       {"ssim", to_json(q.ssim)},
                       {"one_minus_flip", to_json(q.one_minus_flip)},
                       {"ssim_clamped", q.ssim_clamped},
                       {"flip_ppd", r.config.flip_ppd}};

    j["pose"] = ojson{{"ate_deg", q.ate.rotation_deg},
                      {"ate_m", q.ate.translation_m},
                      {"pairs", q.ate.pairs},
                      {"alignment_degenerate", q.alignment.degenerate},
                      {"alignment_scale", q.alignment.scale},
                      {"rpe_delta_s", q.rpe_delta_s},
                      {"rpe_pairs", q.rpe_pairs},
                      {"rpe_translation_m", to_json(q.rpe_translation)},
                      {"rpe_rotation_deg", to_json(q.rpe_rotation)}};
    j["flags"] = r.flags;
    ojson inv = ojson::object();
    for (const auto& [k, v] : r.invariants) inv[k] = v;
    j["invariants"] = inv;
    j["ok"] = r.ok();
    return j;
}

}  // namespace

std::string report_json(const SessionReport& r) { return build_json(r).dump(2) + "\n"; }

std::string report_csv(const SessionReport& r) {
    std::string out = "section,name,metric,value\n";
    auto row = [&](const std::string& sec, const std::string& name, const std::string& metric, double v) {
        out += sec + ',' + name + ',' + metric + ',' + format_double(v) + '\n';
    };
    for (const auto& s : r.stats) {
        row("component", s.name, "target_hz", s.target_hz);
        row("component", s.name, "achieved_hz", s.achieved_hz);
        row("component", s.name, "invocations", static_cast<double>(s.invocations));
        row("component", s.name, "skips", static_cast<double>(s.skips));
        row("component", s.name, "mean_ms", s.mean_ms);
        row("component", s.name, "std_ms", s.std_ms);
        row("component", s.name, "miss_fraction", s.miss_fraction);
        auto it = r.cpu.find(s.name);
        row("component", s.name, "cpu_fraction", it == r.cpu.end() ? 0.0 : it->second);
    }
    const auto& q = r.quality;
    row("mtp", "total", "mean_ms", q.mtp.total_ms.mean);
    row("mtp", "total", "std_ms", q.mtp.total_ms.std);
    row("mtp", "total", "max_ms", q.mtp.max_ms);
    row("image", "ssim", "mean", q.ssim.mean);
    row("image", "ssim", "std", q.ssim.std);
    row("image", "one_minus_flip", "mean", q.one_minus_flip.mean);
    row("image", "one_minus_flip", "std", q.one_minus_flip.std);
    row("pose", "ate", "deg", q.ate.rotation_deg);
    row("pose", "ate", "m", q.ate.translation_m);
    row("pose", "rpe_translation", "rmse_m", q.rpe_translation.rmse);
    row("pose", "rpe_rotation", "rmse_deg", q.rpe_rotation.rmse);
    return out;
}

void write_report(const std::string& dir, const SessionReport& r) {
    fs::create_directories(dir);
    std::ofstream((fs::path(dir) / "report.json").string(), std::ios::binary) << report_json(r);
    std::ofstream((fs::path(dir) / "report.csv").string(), std::ios::binary) << report_csv(r);
}

}  // namespace xrsim

// Command-line front end: run, replay, report, validate-config.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xrsim/harness/session.hpp"
#include "xrsim/runtime/errors.hpp"

namespace fs = std::filesystem;
using namespace xrsim;

namespace {

constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

SessionConfig build_config(const std::string& path, const std::vector<std::string>& sets) {
    SessionConfig cfg = path.empty() ? SessionConfig{} : load_config(path);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

void print_summary(const SessionReport& r, std::ostream& os) {
    char line[256];
    os << "component            target_hz  achieved_hz   invoc  skips  mean_ms   std_ms  miss   cpu\n";
    for (const auto& s : r.stats) {
        auto it = r.cpu.find(s.name);
        std::snprintf(line, sizeof line, "%-18s %11.2f %12.2f %7llu %6llu %8.3f %8.3f %5.3f %5.3f%s\n", s.name.c_str(),
                      s.target_hz, s.achieved_hz, static_cast<unsigned long long>(s.invocations),
                      static_cast<unsigned long long>(s.skips), s.mean_ms, s.std_ms, s.miss_fraction,
                      it == r.cpu.end() ? 0.0 : it->second, s.note.empty() ? "" : ("  (" + s.note + ")").c_str());
        os << line;
    }
    const auto& q = r.quality;
    std::snprintf(line, sizeof line, "mtp   %.3f +- %.3f ms over %zu frames (max %.3f, bound %.3f; <20ms %.1f%%, <5ms %.1f%%)\n",
                  q.mtp.total_ms.mean, q.mtp.total_ms.std, r.mtp_frames, q.mtp.max_ms, r.mtp_bound_ms,
                  100 * q.mtp.within_vr, 100 * q.mtp.within_ar);
    os << line;
    std::snprintf(line, sizeof line, "ssim  %.4f +- %.4f   1-flip %.4f +- %.4f   (%zu frames)\n", q.ssim.mean, q.ssim.std,
                  q.one_minus_flip.mean, q.one_minus_flip.std, r.frames_scored);
    os << line;
    std::snprintf(line, sizeof line, "ate   %.4f deg / %.4f m   rpe(%.2fs) %.4f m / %.4f deg rmse\n", q.ate.rotation_deg,
                  q.ate.translation_m, q.rpe_delta_s, q.rpe_translation.rmse, q.rpe_rotation.rmse);
    os << line;
    for (const auto& f : r.flags) os << "flag: " << f << '\n';
    for (const auto& [k, v] : r.invariants)
        if (!v) os << "INVARIANT VIOLATED: " << k << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xrsim: XR runtime simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "session_out", clock_mode;
    std::vector<std::string> sets;
    double duration = -1;
    long long seed = -1;

    auto* run = app.add_subcommand("run", "run a session and write its directory");
    run->add_option("-c,--config", config_path, "key = value config file");
    run->add_option("-s,--set", sets, "override one config key (key=value), repeatable");
    run->add_option("-o,--out", out_dir, "output directory");
    run->add_option("--duration", duration, "session length in seconds");
    run->add_option("--seed", seed, "session seed");
    run->add_option("--clock", clock_mode, "simulated | wall");

    std::string replay_dir, replay_out;
    auto* replay = app.add_subcommand("replay", "recompute all metrics from a session directory");
    replay->add_option("dir", replay_dir, "session directory")->required();
    replay->add_option("-o,--out", replay_out, "where to write the report (default: <dir>/replay)");

    std::string report_dir;
    auto* report = app.add_subcommand("report", "print the stored report of a session directory");
    report->add_option("dir", report_dir, "session directory")->required();

    std::string validate_path;
    std::vector<std::string> validate_sets;
    auto* validate = app.add_subcommand("validate-config", "check a config file and print its canonical form");
    validate->add_option("file", validate_path, "config file (omit for defaults)");
    validate->add_option("-s,--set", validate_sets, "override one config key (key=value), repeatable");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            if (duration > 0) sets.push_back("duration_s=" + std::to_string(duration));
            if (seed >= 0) sets.push_back("seed=" + std::to_string(seed));
            if (!clock_mode.empty()) sets.push_back("clock=" + clock_mode);
            const auto cfg = build_config(config_path, sets);
            const auto t0 = std::chrono::steady_clock::now();
            const auto r = run_session(cfg, out_dir);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            print_summary(r, std::cout);
            std::printf("session written to %s in %.2f s\n", out_dir.c_str(), secs);
            return r.ok() ? 0 : kExitViolation;
        }
        if (*replay) {
            const auto r = evaluate_session(replay_dir);
            const std::string dest = replay_out.empty() ? (fs::path(replay_dir) / "replay").string() : replay_out;
            write_report(dest, r);
            print_summary(r, std::cout);
            std::printf("report written to %s\n", dest.c_str());
            return r.ok() ? 0 : kExitViolation;
        }
        if (*report) {
            std::ifstream is(fs::path(report_dir) / "report.json");
            if (!is) throw InputError("no report.json in '" + report_dir + "'");
            const auto j = nlohmann::json::parse(is);
            for (const auto& c : j.at("components"))
                std::printf("%-16s %8.2f / %8.2f Hz  mean %7.3f ms  miss %.3f  cpu %.3f\n",
                            c.at("name").get<std::string>().c_str(), c.at("achieved_hz").get<double>(),
                            c.at("target_hz").get<double>(), c.at("mean_ms").get<double>(),
                            c.at("miss_fraction").get<double>(), c.at("cpu_fraction").get<double>());
            std::cout << "mtp   " << j.at("mtp").dump() << '\n'
                      << "image " << j.at("image").dump() << '\n'
                      << "pose  " << j.at("pose").dump() << '\n'
                      << "flags " << j.at("flags").dump() << '\n'
                      << "invariants " << j.at("invariants").dump() << '\n';
            return j.at("ok").get<bool>() ? 0 : kExitViolation;
        }
        if (*validate) {
            const auto cfg = build_config(validate_path, validate_sets);
            std::cout << serialize_config(cfg);
            return 0;
        }
    } catch (const RunAborted& e) {
        std::fprintf(stderr, "run aborted: %s (%zu records flushed)\n", e.what(), e.partial_trace.size());
        try {
            if (e.cause) std::rethrow_exception(e.cause);
        } catch (const std::exception& inner) {
            std::fprintf(stderr, "  cause: %s\n", inner.what());
        }
        return kExitError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return 0;
}

#pragma once

// End-to-end session helpers shared by the unit tests and the acceptance binary.

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

#include "xrsim/harness/session.hpp"

namespace support {

using namespace xrsim;

struct Counts {
    std::uint64_t invocations = 0;
    std::uint64_t skips = 0;
};

// every plugin body free: no synthetic cost and no VIO latency
inline SessionConfig zero_cost(SessionConfig cfg) {
    for (auto& [name, cost] : cfg.costs) cost = CostModel::constant(0.0);
    cfg.vio.latency_ms = 0.0;
    return cfg;
}

// small frames keep the raycaster out of the way when only the schedule matters
inline SessionConfig schedule_only(SessionConfig cfg) {
    cfg.image_scale = 0.025;
    cfg.camera_width = 32;
    cfg.camera_height = 24;
    return cfg;
}

inline std::map<std::string, Counts> run_counts(const SessionConfig& cfg) {
    Pipeline p = wire_pipelines(cfg);
    Clock clock = Clock::simulated();
    std::map<std::string, Counts> out;
    for (const auto& name : plugin_names()) out[name];
    for (const auto& r : p.runtime->run(clock, cfg.duration(), cfg.seed)) {
        auto& c = out[r.plugin];
        (r.skipped ? c.skips : c.invocations) += 1;
    }
    return out;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

// byte comparison of every regular file under two directories
inline bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b, std::string* first_diff = nullptr) {
    namespace fs = std::filesystem;
    std::size_t na = 0, nb = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        ++na;
        const auto rel = fs::relative(e.path(), a);
        if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) {
            if (first_diff) *first_diff = rel.string();
            return false;
        }
    }
    for (const auto& e : fs::recursive_directory_iterator(b)) nb += e.is_regular_file();
    if (na != nb && first_diff) *first_diff = "file count";
    return na == nb;
}

}  // namespace support

#include "xrsim/metrics/timing.hpp"

#include <cmath>
#include <fstream>

#include "xrsim/common/text.hpp"
#include "xrsim/runtime/errors.hpp"

namespace xrsim {

MtpRecord record_mtp(Timestamp imu_ts, Timestamp start, Timestamp end, Timestamp pixels, std::uint64_t seq) {
    if (!(imu_ts <= start && start <= end && end <= pixels))
        throw InputError("mtp: expected imu_ts <= reprojection start <= end <= pixels start");
    return MtpRecord{seq, pixels, start - imu_ts, end - start, pixels - end};
}

Timestamp next_vsync(Timestamp t, const Period& display) { return display.slot(display.first_slot_at_or_after(t)); }

namespace {
constexpr const char* kMtpHeader = "frame_seq,ts_ns,imu_age_ns,reprojection_ns,swap_ns,total_ns";
}

void write_mtp_csv(const std::string& path, const std::vector<MtpRecord>& records) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    os << kMtpHeader << '\n';
    for (const auto& r : records)
        os << r.frame_seq << ',' << r.ts.ns << ',' << r.imu_age.ns << ',' << r.reprojection.ns << ',' << r.swap.ns << ','
           << r.total().ns << '\n';
}

std::vector<MtpRecord> read_mtp_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || trim(line) != kMtpHeader) throw InputError("'" + path + "': wrong MTP header");
    std::vector<MtpRecord> out;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 6) {
            if (is.peek() == EOF) break;
            throw InputError("'" + path + "': expected 6 fields");
        }
        MtpRecord r;
        r.frame_seq = static_cast<std::uint64_t>(parse_int64(f[0], path));
        r.ts.ns = parse_int64(f[1], path);
        r.imu_age.ns = parse_int64(f[2], path);
        r.reprojection.ns = parse_int64(f[3], path);
        r.swap.ns = parse_int64(f[4], path);
        if (r.total().ns != parse_int64(f[5], path)) throw InputError("'" + path + "': total column disagrees");
        out.push_back(r);
    }
    return out;
}

FrameStats frame_stats(const std::vector<InvocationRecord>& trace, const std::map<std::string, double>& targets,
                       Duration duration) {
    if (trace.empty()) throw InputError("frame_stats: empty trace");
    if (duration.ns <= 0) throw InputError("frame_stats: duration must be positive");

    std::vector<std::string> order;
    std::map<std::string, std::vector<const InvocationRecord*>> by;
    for (const auto& r : trace) {
        if (!by.count(r.plugin)) order.push_back(r.plugin);
        by[r.plugin].push_back(&r);
    }
    for (const auto& [name, hz] : targets)
        if (!by.count(name)) {
            order.push_back(name);
            by[name];
        }

    FrameStats out;
    for (const auto& name : order) {
        ComponentStats s;
        s.name = name;
        auto t = targets.find(name);
        s.target_hz = t == targets.end() ? 0.0 : t->second;
        double sum = 0.0, sq = 0.0;
        std::uint64_t misses = 0;
        for (const auto* r : by[name]) {
            if (r->skipped) {
                ++s.skips;
                continue;
            }
            ++s.invocations;
            const double ms = r->wall().ms();
            sum += ms;
            sq += ms * ms;
            if (!r->deadline_met) ++misses;
        }
        if (s.invocations > 0) {
            const double n = static_cast<double>(s.invocations);
            s.mean_ms = sum / n;
            s.std_ms = std::sqrt(std::max(0.0, sq / n - s.mean_ms * s.mean_ms));
            s.miss_fraction = static_cast<double>(misses) / n;
        } else {
            s.note = s.skips > 0 ? "every slot skipped" : "never invoked";
        }
        s.achieved_hz = static_cast<double>(s.invocations) / duration.sec();
        out.push_back(std::move(s));
    }
    return out;
}

std::map<std::string, double> cpu_attribution(const std::vector<InvocationRecord>& trace) {
    std::map<std::string, double> cpu;
    double total = 0.0;
    for (const auto& r : trace) {
        cpu[r.plugin] += static_cast<double>(r.cpu_time.ns);
        total += static_cast<double>(r.cpu_time.ns);
    }
    for (auto& [name, v] : cpu) v = total > 0 ? v / total : 1.0 / static_cast<double>(cpu.size());
    return cpu;
}

}  // namespace xrsim

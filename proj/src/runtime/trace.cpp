#include "xrsim/runtime/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace xrsim {

namespace {

constexpr const char* kHeader = "plugin,seq,start_ns,end_ns,cpu_ns,deadline_met,skipped";

template <typename T>
T parse_int(const std::string& s, std::size_t line) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InputError("trace csv line " + std::to_string(line) + ": bad integer '" + s + "'");
    return v;
}

}  // namespace

void write_trace_csv(std::ostream& os, const std::vector<InvocationRecord>& trace) {
    os << kHeader << '\n';
    for (const auto& r : trace) {
        os << r.plugin << ',' << r.seq << ',' << r.start.ns << ',' << r.end.ns << ',' << r.cpu_time.ns << ','
           << (r.deadline_met ? 1 : 0) << ',' << (r.skipped ? 1 : 0) << '\n';
    }
}

void write_trace_csv(const std::string& path, const std::vector<InvocationRecord>& trace) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    write_trace_csv(os, trace);
}

std::vector<InvocationRecord> read_trace_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kHeader) throw InputError("trace csv: missing or wrong header");
    std::vector<InvocationRecord> out;
    std::size_t n = 1;
    while (std::getline(is, line)) {
        ++n;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 7) throw InputError("trace csv line " + std::to_string(n) + ": expected 7 fields");
        InvocationRecord r;
        r.plugin = f[0];
        r.seq = parse_int<std::uint64_t>(f[1], n);
        r.start.ns = parse_int<std::int64_t>(f[2], n);
        r.end.ns = parse_int<std::int64_t>(f[3], n);
        r.cpu_time.ns = parse_int<std::int64_t>(f[4], n);
        r.deadline_met = parse_int<int>(f[5], n) != 0;
        r.skipped = parse_int<int>(f[6], n) != 0;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<InvocationRecord> read_trace_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open '" + path + "'");
    return read_trace_csv(is);
}

}  // namespace xrsim

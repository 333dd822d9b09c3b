#include "xrsim/perception/trajectory_io.hpp"

#include <fstream>

#include "xrsim/common/text.hpp"
#include "xrsim/runtime/errors.hpp"

namespace xrsim {

namespace {
constexpr const char* kHeader = "ts_ns,px,py,pz,qw,qx,qy,qz,vx,vy,vz";
}

void write_trajectory_csv(const std::string& path, const std::vector<PoseSample>& poses) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    os << kHeader << '\n';
    for (const auto& s : poses) {
        const auto& p = s.pose.position;
        const auto& q = s.pose.orientation;
        const auto& v = s.linear_velocity;
        os << s.ts.ns;
        for (double x : {p.x(), p.y(), p.z(), q.w(), q.x(), q.y(), q.z(), v.x(), v.y(), v.z()})
            os << ',' << format_double(x);
        os << '\n';
    }
}

std::vector<PoseSample> read_trajectory_csv(const std::string& path, PoseSource source, bool* truncated) {
    if (truncated) *truncated = false;
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || trim(line) != kHeader) throw InputError("'" + path + "': wrong trajectory header");
    std::vector<PoseSample> out;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        // an unterminated final line is a partial write: dropped, not fatal
        if (is.eof()) {
            if (truncated) *truncated = true;
            break;
        }
        const auto f = split(line, ',');
        if (f.size() != 11) throw InputError("'" + path + "': expected 11 fields");
        PoseSample s;
        s.ts.ns = parse_int64(f[0], path);
        double d[10];
        for (int i = 0; i < 10; ++i) d[i] = parse_double(f[i + 1], path);
        s.pose.position = Vec3(d[0], d[1], d[2]);
        s.pose.orientation = Quat(d[3], d[4], d[5], d[6]);
        s.linear_velocity = Vec3(d[7], d[8], d[9]);
        s.source = source;
        out.push_back(s);
    }
    return out;
}

}  // namespace xrsim

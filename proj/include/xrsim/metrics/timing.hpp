#pragma once

#include <map>
#include <string>
#include <vector>

#include "xrsim/runtime/plugin.hpp"

namespace xrsim {

/// Motion-to-photon decomposition of one displayed frame. Display scan-out
/// time is not included.
struct MtpRecord {
    std::uint64_t frame_seq = 0;
    Timestamp ts;          ///< when pixels start to appear
    Duration imu_age;      ///< reprojection start - IMU sample time of the pose used
    Duration reprojection; ///< reprojection end - start
    Duration swap;         ///< pixels start - reprojection end (includes waiting for vsync)

    Duration total() const { return imu_age + reprojection + swap; }
    bool operator==(const MtpRecord&) const = default;
};

/// Throws InputError unless imu_ts <= start <= end <= pixels_start.
MtpRecord record_mtp(Timestamp imu_sample_ts, Timestamp reproj_start, Timestamp reproj_end, Timestamp pixels_start,
                     std::uint64_t frame_seq = 0);

/// First vsync at or after t for a display of the given period.
Timestamp next_vsync(Timestamp t, const Period& display);

/// Columns: frame_seq,ts_ns,imu_age_ns,reprojection_ns,swap_ns,total_ns
void write_mtp_csv(const std::string& path, const std::vector<MtpRecord>& records);
std::vector<MtpRecord> read_mtp_csv(const std::string& path);

struct ComponentStats {
    std::string name;
    std::uint64_t invocations = 0;  ///< completed (not skipped)
    std::uint64_t skips = 0;
    double target_hz = 0.0;         ///< 0 when the component has no fixed rate
    double achieved_hz = 0.0;       ///< invocations / duration
    double mean_ms = 0.0;           ///< wall time per invocation
    double std_ms = 0.0;            ///< population std
    double miss_fraction = 0.0;     ///< over completed invocations
    std::string note;               ///< reason when invocations == 0
};

using FrameStats = std::vector<ComponentStats>;

/// Per-component timing. `targets` maps plugin name -> target rate (Hz);
/// components in `targets` with no records still appear, with a note.
/// Throws InputError on an empty trace or non-positive duration.
FrameStats frame_stats(const std::vector<InvocationRecord>& trace, const std::map<std::string, double>& targets,
                       Duration duration);

/// Each component's share of total CPU time; sums to 1. Uniform when no CPU time was recorded.
std::map<std::string, double> cpu_attribution(const std::vector<InvocationRecord>& trace);

}  // namespace xrsim

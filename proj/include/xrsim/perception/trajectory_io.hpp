#pragma once

#include <string>
#include <vector>

#include "xrsim/perception/pose.hpp"

namespace xrsim {

/// Columns: ts_ns,px,py,pz,qw,qx,qy,qz,vx,vy,vz
void write_trajectory_csv(const std::string& path, const std::vector<PoseSample>& poses);
std::vector<PoseSample> read_trajectory_csv(const std::string& path, PoseSource source, bool* truncated = nullptr);

}  // namespace xrsim

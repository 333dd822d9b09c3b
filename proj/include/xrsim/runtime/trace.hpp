#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "xrsim/runtime/plugin.hpp"

namespace xrsim {

/// Columns: plugin,seq,start_ns,end_ns,cpu_ns,deadline_met,skipped
void write_trace_csv(std::ostream& os, const std::vector<InvocationRecord>& trace);
void write_trace_csv(const std::string& path, const std::vector<InvocationRecord>& trace);

/// Throws InputError on a malformed header or row.
std::vector<InvocationRecord> read_trace_csv(std::istream& is);
std::vector<InvocationRecord> read_trace_csv(const std::string& path);

}  // namespace xrsim

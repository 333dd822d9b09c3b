#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace xrsim {

/// Shortest representation that round-trips exactly.
std::string format_double(double v);

/// Whole-string parses; throw InputError naming `what` on failure.
double parse_double(std::string_view s, std::string_view what);
std::int64_t parse_int64(std::string_view s, std::string_view what);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace xrsim

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gshs {

// Shortest round-trip decimal representation.
std::string format_double(double v);

// RFC 4180 field: quoted when it contains a comma, quote or line break.
std::string csv_field(std::string_view s);
std::string csv_row(const std::vector<std::string>& fields);
// Trailing metadata line, "# config_hash=<16 hex digits>".
std::string config_hash_line(std::uint64_t hash);
std::string hex64(std::uint64_t v);

}  // namespace gshs

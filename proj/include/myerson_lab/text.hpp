#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace myerson_lab {

/// 17 significant digits, enough for an exact double round trip.
std::string format_real(double x);

/// Strict parse of a whole token; throws MalformedInput naming `what`.
double parse_real(std::string_view token, std::string_view what);
std::int64_t parse_int(std::string_view token, std::string_view what);
std::uint64_t parse_u64(std::string_view token, std::string_view what);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// FNV-1a, used to tag outputs with a stable config hash.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace myerson_lab

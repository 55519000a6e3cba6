#include "myerson_lab/text.hpp"

#include <charconv>
#include <cstdio>
#include <string>

#include "myerson_lab/errors.hpp"

namespace myerson_lab {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

template <class T>
T parse_number(std::string_view token, std::string_view what) {
  token = trim(token);
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw MalformedInput("invalid " + std::string(what) + ": '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

double parse_real(std::string_view token, std::string_view what) {
  return parse_number<double>(token, what);
}

std::int64_t parse_int(std::string_view token, std::string_view what) {
  return parse_number<std::int64_t>(token, what);
}

std::uint64_t parse_u64(std::string_view token, std::string_view what) {
  return parse_number<std::uint64_t>(token, what);
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace myerson_lab

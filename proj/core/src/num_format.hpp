#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

namespace cic::detail {

/// Shortest text with 17 significant digits; round-trips IEEE doubles.
inline std::string fmt17(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

/// Locale-independent double parse over the full token. Returns false on
/// trailing junk or empty input.
inline bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace cic::detail

#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace sigverify::detail {

/// Shortest decimal form that parses back to the same double. Keeps file
/// output byte-deterministic and round-trip exact.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

/// Strict full-token parse; rejects trailing garbage, empty tokens, inf/nan
/// spellings are accepted only as produced by format_double (never, for
/// finite data).
inline std::optional<double> parse_double(std::string_view token) {
  if (token.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

inline std::optional<long long> parse_int(std::string_view token) {
  if (token.empty()) return std::nullopt;
  long long value = 0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    return std::nullopt;
  return value;
}

}  // namespace sigverify::detail

#pragma once

#include <charconv>
#include <string>

namespace modgraph::detail {

// Shortest decimal that round-trips to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

// Fixed number of significant digits; trailing zeros dropped.
inline std::string format_sig(double v, int digits = 12) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace modgraph::detail

#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace bem2d::detail {

// Shortest round-trip representation; identical bytes for identical values.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace bem2d::detail

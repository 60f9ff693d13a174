#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace rlvr {

/// Shortest decimal text that round-trips to the same double ("300", "0.1").
/// Fixed notation for ordinary magnitudes, scientific only for extreme ones.
inline std::string shortest(double value) {
  char buf[512];
  const double mag = std::abs(value);
  const bool fixed = value == 0.0 || (mag >= 1e-6 && mag < 1e15);
  auto [ptr, ec] = fixed ? std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed)
                         : std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace rlvr

#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace newsgate {

/// Reals in human-facing outputs carry 12 significant digits.
inline std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

/// The double nearest to format_real(value); printing it again is stable.
inline double round_real(double value) { return std::strtod(format_real(value).c_str(), nullptr); }

}  // namespace newsgate

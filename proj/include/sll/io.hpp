#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace sll {

/// Doubles are emitted with 17 significant digits, enough to round-trip
/// exactly, so rerunning a configuration reproduces output byte for byte.
inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace sll

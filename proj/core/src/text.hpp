#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace cbmo::detail {

// Shortest round-trippable-enough rendering used in witness labels.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace cbmo::detail

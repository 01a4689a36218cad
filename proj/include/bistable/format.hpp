#pragma once

#include <cstdio>
#include <string>

namespace bistable {

/// 12 significant digits, the precision of every number the tools print.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace bistable

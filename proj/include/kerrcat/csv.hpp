#pragma once

#include <cstdio>
#include <string>

namespace kerrcat {

/// Fixed %.12e rendering so identical runs give byte-identical files.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

}  // namespace kerrcat

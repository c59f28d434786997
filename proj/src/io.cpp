#include "enkfsq/io.hpp"

#include <cmath>
#include <cstdio>

namespace enkfsq {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace enkfsq

#pragma once

#include <string>

namespace enkfsq {

/// Shortest round-trip-safe text for a double: printf "%.17g". NaN is written
/// as "nan" and empty-bin markers are written by callers as empty fields.
std::string fmt_double(double v);

}  // namespace enkfsq

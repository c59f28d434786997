#pragma once

#include <stdexcept>
#include <string>

namespace enkfsq {

/// Raised on violated preconditions (invalid parameters, degenerate
/// likelihoods, malformed configuration).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace enkfsq

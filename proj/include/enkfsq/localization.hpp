#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "enkfsq/ensemble.hpp"

namespace enkfsq {

struct LocalizationConfig {
  double radius_km = 300.0;

  void validate() const;
};

/// Number of cells between a and b going the short way around the ring.
std::size_t ring_distance(std::size_t a, std::size_t b, std::size_t n_cells);

/// Cell of the observation closest to `cell`, if it lies within the influence
/// radius. Ties go to the lower cell index.
std::optional<std::size_t> nearest_observation(std::size_t cell,
                                               std::span<const std::size_t> obs_cells,
                                               const LocalizationConfig& cfg,
                                               const GridSpec& grid);

}  // namespace enkfsq

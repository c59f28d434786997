#include "enkfsq/localization.hpp"

#include "enkfsq/error.hpp"

namespace enkfsq {

void LocalizationConfig::validate() const {
  if (!(radius_km > 0.0)) throw Error("localization: radius_km must be > 0");
}

std::size_t ring_distance(std::size_t a, std::size_t b, std::size_t n_cells) {
  const std::size_t d = a > b ? a - b : b - a;
  return d <= n_cells - d ? d : n_cells - d;
}

std::optional<std::size_t> nearest_observation(std::size_t cell,
                                               std::span<const std::size_t> obs_cells,
                                               const LocalizationConfig& cfg,
                                               const GridSpec& grid) {
  std::optional<std::size_t> best;
  std::size_t best_dist = 0;
  for (std::size_t obs : obs_cells) {
    const std::size_t d = ring_distance(cell, obs, grid.n_cells);
    if (static_cast<double>(d) * grid.cell_spacing_km > cfg.radius_km) continue;
    if (!best || d < best_dist || (d == best_dist && obs < *best)) {
      best = obs;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace enkfsq

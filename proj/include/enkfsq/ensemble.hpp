#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "enkfsq/random.hpp"

namespace enkfsq {

/// 1-D periodic grid.
struct GridSpec {
  std::size_t n_cells = 100;
  double cell_spacing_km = 12.5;
  bool periodic = true;

  /// Throws enkfsq::Error unless n_cells >= 2 and spacing > 0.
  void validate() const;
  double cell_area_km2() const { return cell_spacing_km * cell_spacing_km; }
};

/// Sea ice thickness (m) and concentration per cell.
struct StateField {
  std::vector<double> sit;
  std::vector<double> sic;

  StateField() = default;
  explicit StateField(std::size_t n_cells) : sit(n_cells, 0.0), sic(n_cells, 0.0) {}

  std::size_t size() const { return sit.size(); }
  bool operator==(const StateField&) const = default;
};

/// Ensemble of N >= 2 members on a shared grid, stored member by member.
class Ensemble {
 public:
  Ensemble(GridSpec grid, std::vector<StateField> members);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return members_.size(); }

  const StateField& member(std::size_t i) const { return members_[i]; }
  StateField& member(std::size_t i) { return members_[i]; }
  std::span<const StateField> members() const { return members_; }
  std::span<StateField> members() { return members_; }

  /// Copies the thickness of every member at `cell` into `out` (size N).
  void gather_sit(std::size_t cell, std::span<double> out) const;
  void gather_sic(std::size_t cell, std::span<double> out) const;
  std::vector<double> sit_column(std::size_t cell) const;

  /// First `n` members as a new ensemble.
  Ensemble head(std::size_t n) const;

 private:
  GridSpec grid_;
  std::vector<StateField> members_;
};

/// Per-cell, per-variable mean over members.
StateField ensemble_mean(const Ensemble& e);

/// member - mean, for every member.
std::vector<StateField> ensemble_anomalies(const Ensemble& e);

/// Entries of P^f H^T and H P^f H^T for one local analysis, where H picks
/// thickness at the observed cell. Sample (1/(N-1)) normalization.
struct LocalCovariances {
  double cov_sit_obs = 0.0;
  double cov_sic_obs = 0.0;
  double var_obs = 0.0;
};

LocalCovariances local_covariances(const Ensemble& e, std::size_t cell, std::size_t obs_cell);

/// Same quantity from already gathered member columns.
LocalCovariances local_covariances(std::span<const double> sit_cell,
                                   std::span<const double> sic_cell,
                                   std::span<const double> sit_obs);

/// Unbiased sample variance of one column (1/(N-1)).
double sample_variance(std::span<const double> column);

/// y + sigma_h * Z with Z standard normal. Always consumes one normal draw.
double perturb_observation_hard(double y, double sigma_h, RandomStream& rng);

}  // namespace enkfsq

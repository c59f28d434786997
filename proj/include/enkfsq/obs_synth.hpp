#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "enkfsq/ensemble.hpp"
#include "enkfsq/random.hpp"

namespace enkfsq {

/// Thickness observation error grows linearly with the true thickness:
/// sigma = slope * t + intercept.
struct ObsErrorModel {
  double slope = 0.06;
  double intercept = 0.05;

  void validate() const;
};

/// Throws enkfsq::Error for t < 0.
double obs_error_std(const ObsErrorModel& m, double t);

/// Uncensored synthetic observation, collocated with a grid cell.
struct RawObservation {
  std::size_t cell = 0;
  double value = 0.0;
};

/// One observation per ice-covered cell of `truth`: t + sigma(t) Z, clamped
/// below at 0. Open-water cells are not observed. Values are returned in cell
/// order and are not censored; censoring belongs to the assimilation scheme.
std::vector<RawObservation> generate_observations(const StateField& truth,
                                                  const ObsErrorModel& m, RandomStream& rng);

struct ClimatologyEntry {
  double mean_above = 0.0;
  double var_above = 0.0;
  std::size_t count = 0;
};

/// Per-cell mean and sample variance of truth thickness strictly above the
/// detection limit. Cells with fewer than two qualifying samples are
/// unpopulated.
class ClimatologyTable {
 public:
  ClimatologyTable() = default;
  ClimatologyTable(double mu, std::vector<ClimatologyEntry> cells)
      : mu_(mu), cells_(std::move(cells)) {}

  double detection_limit() const { return mu_; }
  std::size_t n_cells() const { return cells_.size(); }
  std::size_t count(std::size_t cell) const { return cells_[cell].count; }
  /// Entry for a populated cell, nothing otherwise.
  std::optional<ClimatologyEntry> at(std::size_t cell) const;
  std::size_t populated() const;

  /// CSV `cell,mean_above,var_above,count`; unpopulated cells have empty
  /// mean/var fields.
  void write_csv(std::ostream& os) const;

 private:
  double mu_ = 0.0;
  std::vector<ClimatologyEntry> cells_;
};

ClimatologyTable build_climatology(std::span<const StateField> truth_series, double mu);

}  // namespace enkfsq

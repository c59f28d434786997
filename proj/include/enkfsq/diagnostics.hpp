#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "enkfsq/ensemble.hpp"
#include "enkfsq/filters.hpp"
#include "enkfsq/obs_synth.hpp"

namespace enkfsq {

/// Thickness bins (lo, hi]; the first bin also contains its lower edge.
struct BinSpec {
  std::vector<double> edges;

  /// {0, 0.10, 0.25, 0.50, ..., 3.00, inf}: a 10 cm first bin matching the
  /// model minimum thickness, then 25 cm bins, then everything above 3 m.
  static BinSpec standard();

  void validate() const;
  std::size_t n_bins() const { return edges.size() - 1; }
  std::optional<std::size_t> bin_of(double x) const;
  /// "lo-hi" with the upper edge written as "inf" for the open bin.
  std::string label(std::size_t k) const;
};

/// Running per-bin sums so binned statistics can be pooled over cycles.
class BinnedAccumulator {
 public:
  explicit BinnedAccumulator(std::size_t n_bins) : sum_(n_bins), sum_sq_(n_bins), count_(n_bins) {}

  void add(std::size_t bin, double v);
  std::size_t n_bins() const { return count_.size(); }
  std::size_t count(std::size_t bin) const { return count_[bin]; }
  std::size_t total_count() const;
  /// Empty bins have no value.
  std::optional<double> mean(std::size_t bin) const;
  std::optional<double> rms(std::size_t bin) const;
  std::vector<std::optional<double>> means() const;
  std::vector<std::optional<double>> rms_values() const;

 private:
  std::vector<double> sum_, sum_sq_;
  std::vector<std::size_t> count_;
};

struct BinnedValues {
  std::vector<std::optional<double>> values;
  std::vector<std::size_t> counts;
};

struct ConditionalBias {
  BinnedValues bins;
  /// Bin biases weighted by the fraction of cells in each bin.
  double weighted_total = 0.0;
};

/// sqrt(mean_c (mean[c] - truth[c])^2)
double rmse(std::span<const double> mean, std::span<const double> truth);

/// sqrt(mean over cells of the member variance of thickness), 1/(N-1).
/// Throws for N < 2.
double aes(const Ensemble& ens);

/// Mean of (post_mean - truth) over cells whose observation falls in each bin.
ConditionalBias conditional_bias(std::span<const double> post_mean,
                                 std::span<const double> truth,
                                 std::span<const RawObservation> obs, const BinSpec& bins);

/// Adds (mean - truth) at every observed cell to the bin of its observation.
void accumulate_by_observation(BinnedAccumulator& acc, std::span<const double> mean,
                               std::span<const double> truth,
                               std::span<const RawObservation> obs, const BinSpec& bins);

/// Moment skewness m3 / m2^1.5 of one column; nothing if m2 is numerically 0.
std::optional<double> sample_skewness(std::span<const double> column);

/// Per bin, average thickness skewness over cells whose truth lies in the
/// bin. Throws for N < 3.
BinnedValues conditional_skewness(const Ensemble& ens, std::span<const double> truth,
                                  const BinSpec& bins);

/// Sum of sit * sic * cell_area.
double ice_volume(const StateField& s, double cell_area);

/// Mean volume over members.
double ensemble_volume(const Ensemble& ens, double cell_area);

/// 100 * soft / total. Throws on an empty list.
double percent_soft(std::span<const RangeLimitedObservation> obs);

}  // namespace enkfsq

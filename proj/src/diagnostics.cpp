#include "enkfsq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "enkfsq/error.hpp"
#include "enkfsq/io.hpp"
#include "enkfsq/kernels.hpp"

namespace enkfsq {

BinSpec BinSpec::standard() {
  BinSpec b;
  b.edges = {0.0, 0.10};
  for (int k = 1; k <= 12; ++k) b.edges.push_back(0.25 * k);
  b.edges.push_back(std::numeric_limits<double>::infinity());
  return b;
}

void BinSpec::validate() const {
  if (edges.size() < 2) throw Error("bins: need at least two edges");
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (!(edges[k] > edges[k - 1])) throw Error("bins: edges must be strictly increasing");
}

std::optional<std::size_t> BinSpec::bin_of(double x) const {
  if (!(x >= edges.front()) || x > edges.back()) return std::nullopt;
  // First edge >= x closes the bin (lo, hi].
  const auto it = std::lower_bound(edges.begin() + 1, edges.end(), x);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

std::string BinSpec::label(std::size_t k) const {
  auto e = [](double v) {
    if (std::isinf(v)) return std::string("inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf);
  };
  return e(edges[k]) + "-" + e(edges[k + 1]);
}

void BinnedAccumulator::add(std::size_t bin, double v) {
  sum_[bin] += v;
  sum_sq_[bin] += v * v;
  ++count_[bin];
}

std::size_t BinnedAccumulator::total_count() const {
  std::size_t t = 0;
  for (auto c : count_) t += c;
  return t;
}

std::optional<double> BinnedAccumulator::mean(std::size_t bin) const {
  if (count_[bin] == 0) return std::nullopt;
  return sum_[bin] / static_cast<double>(count_[bin]);
}

std::optional<double> BinnedAccumulator::rms(std::size_t bin) const {
  if (count_[bin] == 0) return std::nullopt;
  return std::sqrt(sum_sq_[bin] / static_cast<double>(count_[bin]));
}

std::vector<std::optional<double>> BinnedAccumulator::means() const {
  std::vector<std::optional<double>> out(n_bins());
  for (std::size_t k = 0; k < n_bins(); ++k) out[k] = mean(k);
  return out;
}

std::vector<std::optional<double>> BinnedAccumulator::rms_values() const {
  std::vector<std::optional<double>> out(n_bins());
  for (std::size_t k = 0; k < n_bins(); ++k) out[k] = rms(k);
  return out;
}

double rmse(std::span<const double> mean, std::span<const double> truth) {
  if (mean.size() != truth.size()) throw Error("rmse: size mismatch");
  if (mean.empty()) return 0.0;
  return std::sqrt(kernels::squared_distance(mean, truth) / static_cast<double>(mean.size()));
}

double aes(const Ensemble& ens) {
  const std::size_t n = ens.grid().n_cells;
  std::vector<double> col(ens.size());
  double total = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    ens.gather_sit(c, col);
    total += sample_variance(col);
  }
  return std::sqrt(total / static_cast<double>(n));
}

void accumulate_by_observation(BinnedAccumulator& acc, std::span<const double> mean,
                               std::span<const double> truth,
                               std::span<const RawObservation> obs, const BinSpec& bins) {
  for (const auto& o : obs) {
    const auto k = bins.bin_of(o.value);
    if (!k) continue;
    acc.add(*k, mean[o.cell] - truth[o.cell]);
  }
}

ConditionalBias conditional_bias(std::span<const double> post_mean,
                                 std::span<const double> truth,
                                 std::span<const RawObservation> obs, const BinSpec& bins) {
  bins.validate();
  BinnedAccumulator acc(bins.n_bins());
  accumulate_by_observation(acc, post_mean, truth, obs, bins);
  ConditionalBias out;
  out.bins.values = acc.means();
  out.bins.counts.resize(bins.n_bins());
  const double total = static_cast<double>(acc.total_count());
  for (std::size_t k = 0; k < bins.n_bins(); ++k) {
    out.bins.counts[k] = acc.count(k);
    if (auto m = acc.mean(k)) out.weighted_total += (static_cast<double>(acc.count(k)) / total) * *m;
  }
  return out;
}

std::optional<double> sample_skewness(std::span<const double> column) {
  const double n = static_cast<double>(column.size());
  const double mean = kernels::sum(column) / n;
  double m2 = 0.0, m3 = 0.0;
  for (double v : column) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  const double scale = 1e-12 * std::max(1.0, std::abs(mean));
  if (!(m2 > scale * scale)) return std::nullopt;
  return m3 / std::pow(m2, 1.5);
}

BinnedValues conditional_skewness(const Ensemble& ens, std::span<const double> truth,
                                  const BinSpec& bins) {
  if (ens.size() < 3) throw Error("skewness: need at least 3 members");
  bins.validate();
  BinnedAccumulator acc(bins.n_bins());
  std::vector<double> col(ens.size());
  for (std::size_t c = 0; c < ens.grid().n_cells; ++c) {
    const auto k = bins.bin_of(truth[c]);
    if (!k) continue;
    ens.gather_sit(c, col);
    if (auto g1 = sample_skewness(col)) acc.add(*k, *g1);
  }
  BinnedValues out{acc.means(), std::vector<std::size_t>(bins.n_bins())};
  for (std::size_t k = 0; k < bins.n_bins(); ++k) out.counts[k] = acc.count(k);
  return out;
}

double ice_volume(const StateField& s, double cell_area) {
  double v = 0.0;
  for (std::size_t c = 0; c < s.size(); ++c) v += s.sit[c] * s.sic[c];
  return v * cell_area;
}

double ensemble_volume(const Ensemble& ens, double cell_area) {
  double v = 0.0;
  for (const auto& m : ens.members()) v += ice_volume(m, cell_area);
  return v / static_cast<double>(ens.size());
}

double percent_soft(std::span<const RangeLimitedObservation> obs) {
  if (obs.empty()) throw Error("percent_soft: empty observation list");
  const auto soft = std::count_if(obs.begin(), obs.end(), [](const auto& o) { return o.is_soft(); });
  return 100.0 * static_cast<double>(soft) / static_cast<double>(obs.size());
}

}  // namespace enkfsq

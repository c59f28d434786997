#include "enkfsq/obs_synth.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "enkfsq/error.hpp"
#include "enkfsq/io.hpp"

namespace enkfsq {

void ObsErrorModel::validate() const {
  if (!(slope >= 0.0)) throw Error("obs error model: slope must be >= 0");
  if (!(intercept > 0.0)) throw Error("obs error model: intercept must be > 0");
}

double obs_error_std(const ObsErrorModel& m, double t) {
  if (t < 0.0) throw Error("obs error std: thickness must be >= 0, got " + std::to_string(t));
  return m.slope * t + m.intercept;
}

std::vector<RawObservation> generate_observations(const StateField& truth,
                                                  const ObsErrorModel& m, RandomStream& rng) {
  std::vector<RawObservation> out;
  out.reserve(truth.size());
  for (std::size_t c = 0; c < truth.size(); ++c) {
    const double t = truth.sit[c];
    if (!(t > 0.0)) continue;
    const double raw = t + obs_error_std(m, t) * rng.normal();
    out.push_back({c, std::max(raw, 0.0)});
  }
  return out;
}

std::optional<ClimatologyEntry> ClimatologyTable::at(std::size_t cell) const {
  const auto& e = cells_.at(cell);
  if (e.count < 2) return std::nullopt;
  return e;
}

std::size_t ClimatologyTable::populated() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](const auto& e) { return e.count >= 2; }));
}

void ClimatologyTable::write_csv(std::ostream& os) const {
  os << "cell,mean_above,var_above,count\n";
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& e = cells_[c];
    os << c << ',';
    if (e.count >= 2) os << fmt_double(e.mean_above) << ',' << fmt_double(e.var_above);
    else os << ',';
    os << ',' << e.count << '\n';
  }
}

ClimatologyTable build_climatology(std::span<const StateField> truth_series, double mu) {
  if (truth_series.empty()) return ClimatologyTable(mu, {});
  const std::size_t n = truth_series.front().size();
  std::vector<ClimatologyEntry> cells(n);
  // Welford accumulation per cell.
  std::vector<double> m2(n, 0.0);
  for (const auto& s : truth_series) {
    if (s.size() != n) throw Error("climatology: truth series has inconsistent grid sizes");
    for (std::size_t c = 0; c < n; ++c) {
      const double v = s.sit[c];
      if (!(v > mu)) continue;
      auto& e = cells[c];
      ++e.count;
      const double delta = v - e.mean_above;
      e.mean_above += delta / static_cast<double>(e.count);
      m2[c] += delta * (v - e.mean_above);
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    auto& e = cells[c];
    if (e.count >= 2) e.var_above = m2[c] / static_cast<double>(e.count - 1);
    else e.var_above = 0.0;
  }
  return ClimatologyTable(mu, std::move(cells));
}

}  // namespace enkfsq

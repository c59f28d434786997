#include "enkfsq/ensemble.hpp"

#include <string>

#include "enkfsq/error.hpp"
#include "enkfsq/kernels.hpp"

namespace enkfsq {

void GridSpec::validate() const {
  if (n_cells < 2) throw Error("grid: n_cells must be >= 2, got " + std::to_string(n_cells));
  if (!(cell_spacing_km > 0.0)) throw Error("grid: cell_spacing_km must be > 0");
}

Ensemble::Ensemble(GridSpec grid, std::vector<StateField> members)
    : grid_(grid), members_(std::move(members)) {
  grid_.validate();
  if (members_.size() < 2)
    throw Error("ensemble: need at least 2 members, got " + std::to_string(members_.size()));
  for (const auto& m : members_) {
    if (m.sit.size() != grid_.n_cells || m.sic.size() != grid_.n_cells)
      throw Error("ensemble: member size does not match grid");
  }
}

void Ensemble::gather_sit(std::size_t cell, std::span<double> out) const {
  for (std::size_t i = 0; i < members_.size(); ++i) out[i] = members_[i].sit[cell];
}

void Ensemble::gather_sic(std::size_t cell, std::span<double> out) const {
  for (std::size_t i = 0; i < members_.size(); ++i) out[i] = members_[i].sic[cell];
}

std::vector<double> Ensemble::sit_column(std::size_t cell) const {
  std::vector<double> col(members_.size());
  gather_sit(cell, col);
  return col;
}

Ensemble Ensemble::head(std::size_t n) const {
  if (n > members_.size()) throw Error("ensemble: head larger than ensemble");
  return Ensemble(grid_, std::vector<StateField>(members_.begin(), members_.begin() + n));
}

StateField ensemble_mean(const Ensemble& e) {
  const std::size_t n = e.grid().n_cells;
  StateField mean(n);
  for (const auto& m : e.members()) {
    for (std::size_t c = 0; c < n; ++c) {
      mean.sit[c] += m.sit[c];
      mean.sic[c] += m.sic[c];
    }
  }
  const double inv = 1.0 / static_cast<double>(e.size());
  for (std::size_t c = 0; c < n; ++c) {
    mean.sit[c] *= inv;
    mean.sic[c] *= inv;
  }
  return mean;
}

std::vector<StateField> ensemble_anomalies(const Ensemble& e) {
  const StateField mean = ensemble_mean(e);
  std::vector<StateField> out(e.members().begin(), e.members().end());
  for (auto& m : out) {
    for (std::size_t c = 0; c < mean.size(); ++c) {
      m.sit[c] -= mean.sit[c];
      m.sic[c] -= mean.sic[c];
    }
  }
  return out;
}

LocalCovariances local_covariances(std::span<const double> sit_cell,
                                   std::span<const double> sic_cell,
                                   std::span<const double> sit_obs) {
  const std::size_t n = sit_obs.size();
  if (n < 2) throw Error("local covariances: need at least 2 members");
  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_nm1 = 1.0 / static_cast<double>(n - 1);
  const double m_obs = kernels::sum(sit_obs) * inv_n;
  const double m_sit = kernels::sum(sit_cell) * inv_n;
  const double m_sic = kernels::sum(sic_cell) * inv_n;
  LocalCovariances out;
  out.var_obs = kernels::centered_dot(sit_obs, m_obs, sit_obs, m_obs) * inv_nm1;
  out.cov_sit_obs = kernels::centered_dot(sit_cell, m_sit, sit_obs, m_obs) * inv_nm1;
  out.cov_sic_obs = kernels::centered_dot(sic_cell, m_sic, sit_obs, m_obs) * inv_nm1;
  return out;
}

LocalCovariances local_covariances(const Ensemble& e, std::size_t cell, std::size_t obs_cell) {
  const std::size_t n_cells = e.grid().n_cells;
  if (cell >= n_cells || obs_cell >= n_cells) throw Error("local covariances: cell out of grid");
  std::vector<double> sit_c(e.size()), sic_c(e.size()), sit_o(e.size());
  e.gather_sit(cell, sit_c);
  e.gather_sic(cell, sic_c);
  e.gather_sit(obs_cell, sit_o);
  return local_covariances(sit_c, sic_c, sit_o);
}

double sample_variance(std::span<const double> column) {
  if (column.size() < 2) throw Error("sample variance: need at least 2 values");
  const double m = kernels::sum(column) / static_cast<double>(column.size());
  return kernels::centered_dot(column, m, column, m) / static_cast<double>(column.size() - 1);
}

double perturb_observation_hard(double y, double sigma_h, RandomStream& rng) {
  return y + sigma_h * rng.normal();
}

}  // namespace enkfsq

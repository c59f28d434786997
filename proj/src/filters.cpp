#include "enkfsq/filters.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "enkfsq/error.hpp"
#include "enkfsq/kernels.hpp"
#include "enkfsq/two_piece.hpp"

namespace enkfsq {

namespace {

constexpr double kNoLimit = std::numeric_limits<double>::infinity();

struct PriorColumns {
  std::vector<double> sit_cell, sic_cell, sit_obs;

  PriorColumns(const Ensemble& e, std::size_t cell, std::size_t obs_cell)
      : sit_cell(e.size()), sic_cell(e.size()), sit_obs(e.size()) {
    e.gather_sit(cell, sit_cell);
    e.gather_sic(cell, sic_cell);
    e.gather_sit(obs_cell, sit_obs);
  }
};

// x_i += k_i (y_i - Hx_i) for both variables at the updated cell, with
// k_i = cov / (var_obs + R_i).
LocalColumns update_columns(const PriorColumns& prior, const LocalCovariances& cov,
                            std::span<const double> obs_variance,
                            std::span<const double> perturbed) {
  const std::size_t n = prior.sit_obs.size();
  std::vector<double> gain_sit(n), gain_sic(n), innovation(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = cov.var_obs + obs_variance[i];
    if (!(denom > 0.0)) throw Error("analysis: innovation variance is zero");
    gain_sit[i] = cov.cov_sit_obs / denom;
    gain_sic[i] = cov.cov_sic_obs / denom;
    innovation[i] = perturbed[i] - prior.sit_obs[i];
  }
  LocalColumns out{prior.sit_cell, prior.sic_cell};
  kernels::gain_update(out.sit, gain_sit, innovation);
  kernels::gain_update(out.sic, gain_sic, innovation);
  return out;
}

LocalColumns hard_update(const PriorColumns& cols, const HardData& h,
                         std::span<const double> perturbed) {
  const LocalCovariances cov = local_covariances(cols.sit_cell, cols.sic_cell, cols.sit_obs);
  const std::vector<double> r(cols.sit_obs.size(), h.sigma_h * h.sigma_h);
  return update_columns(cols, cov, r, perturbed);
}

LocalColumns soft_update(const PriorColumns& cols, double mu, const SqParams& p,
                         std::span<const double> perturbed) {
  const LocalCovariances cov = local_covariances(cols.sit_cell, cols.sic_cell, cols.sit_obs);
  const double r_in = p.sigma_ir * p.sigma_ir;
  const double sigma_or = p.sigma_or();
  const double r_out = sigma_or * sigma_or;
  std::vector<double> r(cols.sit_obs.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = cols.sit_obs[i] <= mu ? r_in : r_out;
  return update_columns(cols, cov, r, perturbed);
}

void check_member_count(std::span<const double> perturbed, const Ensemble& e) {
  if (perturbed.size() != e.size())
    throw Error("analysis: need one perturbed observation per member");
}

std::string normalize(std::string_view name) {
  std::string s;
  for (char ch : name) {
    if (ch == '-' || ch == '_' || ch == ' ') continue;
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return s;
}

}  // namespace

RangeLimitedObservation make_hard(std::size_t cell, double value, double sigma_h, double mu) {
  if (!(sigma_h > 0.0)) throw Error("hard observation: sigma_h must be > 0");
  return {cell, mu, HardData{value, sigma_h}};
}

RangeLimitedObservation make_soft(std::size_t cell, double mu) { return {cell, mu, SoftData{}}; }

RangeLimitedObservation classify_observation(double raw_value, double mu, double sigma_h,
                                             std::size_t cell) {
  if (raw_value <= mu) return make_hard(cell, raw_value, sigma_h, mu);
  return make_soft(cell, mu);
}

void SqParams::validate() const {
  if (!(sigma_ir > 0.0)) throw Error("sq params: sigma_ir must be > 0");
  if (!(sigma_or_base > 0.0)) throw Error("sq params: sigma_or must be > 0");
  if (!(alpha > 0.0)) throw Error("sq params: alpha must be > 0");
}

double sigma_ir_at_limit(const ObsErrorModel& m, double mu) { return obs_error_std(m, mu); }

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::EnkfAll:
      return "EnKF-ALL";
    case Scheme::EnkfSq:
      return "EnKF-SQ";
    case Scheme::EnkfClim:
      return "EnKF-CLIM";
    case Scheme::EnkfIg:
      return "EnKF-IG";
    case Scheme::FreeRun:
      return "Free-run";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  const std::string s = normalize(name);
  if (s == "enkfall" || s == "all") return Scheme::EnkfAll;
  if (s == "enkfsq" || s == "sq") return Scheme::EnkfSq;
  if (s == "enkfclim" || s == "clim") return Scheme::EnkfClim;
  if (s == "enkfig" || s == "ig") return Scheme::EnkfIg;
  if (s == "freerun" || s == "free") return Scheme::FreeRun;
  throw Error("unknown scheme '" + std::string(name) + "'");
}

SchemeObservations apply_scheme(Scheme scheme, std::span<const RawObservation> raw, double mu,
                                const ObsErrorModel& errors, const ClimatologyTable& clim) {
  SchemeObservations out;
  if (scheme == Scheme::FreeRun) return out;
  out.observations.reserve(raw.size());
  for (const auto& r : raw) {
    const double sigma = obs_error_std(errors, std::max(r.value, 0.0));
    if (scheme == Scheme::EnkfAll) {
      out.observations.push_back(make_hard(r.cell, r.value, sigma, kNoLimit));
      continue;
    }
    if (r.value <= mu) {
      out.observations.push_back(make_hard(r.cell, r.value, sigma, mu));
      continue;
    }
    switch (scheme) {
      case Scheme::EnkfSq:
        out.observations.push_back(make_soft(r.cell, mu));
        break;
      case Scheme::EnkfClim: {
        const auto entry = r.cell < clim.n_cells() ? clim.at(r.cell) : std::nullopt;
        if (!entry) {
          ++out.missing_climatology;
          break;
        }
        const double std_clim = std::max(std::sqrt(entry->var_above), kClimatologyStdFloor);
        out.observations.push_back(make_hard(r.cell, entry->mean_above, std_clim, kNoLimit));
        break;
      }
      default:
        break;  // EnKF-IG drops out-of-range data
    }
  }
  return out;
}

LocalColumns enkf_update_local(const Ensemble& prior, std::size_t cell,
                               const RangeLimitedObservation& obs,
                               std::span<const double> perturbed) {
  if (!obs.is_hard()) throw Error("enkf update: observation is not hard data");
  check_member_count(perturbed, prior);
  return hard_update(PriorColumns(prior, cell, obs.cell), obs.hard(), perturbed);
}

LocalColumns enkf_update_local(const Ensemble& prior, std::size_t cell,
                               const RangeLimitedObservation& obs, RandomStream& rng) {
  if (!obs.is_hard()) throw Error("enkf update: observation is not hard data");
  std::vector<double> y(prior.size());
  for (auto& v : y) v = perturb_observation_hard(obs.hard().value, obs.hard().sigma_h, rng);
  return enkf_update_local(prior, cell, obs, y);
}

LocalColumns enkfsq_update_local(const Ensemble& prior, std::size_t cell,
                                 const RangeLimitedObservation& soft, const SqParams& p,
                                 std::span<const double> perturbed) {
  if (!soft.is_soft()) throw Error("enkf-sq update: observation is not soft data");
  p.validate();
  check_member_count(perturbed, prior);
  return soft_update(PriorColumns(prior, cell, soft.cell), soft.mu, p, perturbed);
}

LocalColumns enkfsq_update_local(const Ensemble& prior, std::size_t cell,
                                 const RangeLimitedObservation& soft, const SqParams& p,
                                 RandomStream& rng) {
  p.validate();
  const TwoPieceGaussian likelihood(soft.mu, p.sigma_ir, p.sigma_or());
  std::vector<double> y(prior.size());
  for (auto& v : y) v = likelihood.sample(rng);
  return enkfsq_update_local(prior, cell, soft, p, y);
}

PerturbedObservations perturb_observations(std::span<const RangeLimitedObservation> obs,
                                           std::span<const SqParams> sq_by_cell,
                                           std::size_t n_members,
                                           const PerturbationStreams& streams) {
  PerturbedObservations out(obs.size(), n_members);
  for (std::size_t j = 0; j < obs.size(); ++j) {
    const auto& o = obs[j];
    auto row = out.row(j);
    if (o.is_hard()) {
      const HardData& h = o.hard();
      for (std::size_t i = 0; i < n_members; ++i) {
        RandomStream rng = streams(i, o.cell);
        row[i] = perturb_observation_hard(h.value, h.sigma_h, rng);
      }
    } else {
      if (o.cell >= sq_by_cell.size()) throw Error("perturbation: no SqParams for soft cell");
      const SqParams& p = sq_by_cell[o.cell];
      p.validate();
      const TwoPieceGaussian likelihood(o.mu, p.sigma_ir, p.sigma_or());
      for (std::size_t i = 0; i < n_members; ++i) {
        RandomStream rng = streams(i, o.cell);
        row[i] = likelihood.sample(rng);
      }
    }
  }
  return out;
}

void post_process(StateField& s) {
  for (std::size_t c = 0; c < s.size(); ++c) {
    s.sic[c] = std::clamp(s.sic[c], 0.0, 1.0);
    if (s.sit[c] < 0.0) s.sit[c] = 0.0;
  }
}

Ensemble analyze(const Ensemble& prior, std::span<const RangeLimitedObservation> obs,
                 std::span<const SqParams> sq_by_cell, const LocalizationConfig& loc,
                 const PerturbedObservations& perturbed) {
  const GridSpec& grid = prior.grid();
  Ensemble posterior = prior;
  if (obs.empty()) return posterior;
  if (perturbed.n_members() != prior.size())
    throw Error("analysis: perturbed observations do not match the ensemble size");

  // Observation index per observed cell; one observation per cell.
  std::vector<std::size_t> obs_index(grid.n_cells, obs.size());
  std::vector<std::size_t> obs_cells;
  obs_cells.reserve(obs.size());
  for (std::size_t j = 0; j < obs.size(); ++j) {
    if (obs[j].cell >= grid.n_cells) throw Error("analysis: observation outside the grid");
    if (obs_index[obs[j].cell] != obs.size())
      throw Error("analysis: more than one observation in a cell");
    obs_index[obs[j].cell] = j;
    obs_cells.push_back(obs[j].cell);
  }

  for (std::size_t c = 0; c < grid.n_cells; ++c) {
    const auto nearest = nearest_observation(c, obs_cells, loc, grid);
    if (!nearest) continue;
    const std::size_t j = obs_index[*nearest];
    const auto& o = obs[j];
    const PriorColumns cols(prior, c, o.cell);
    const LocalColumns updated =
        o.is_hard() ? hard_update(cols, o.hard(), perturbed.row(j))
                    : soft_update(cols, o.mu, sq_by_cell[o.cell], perturbed.row(j));
    for (std::size_t i = 0; i < prior.size(); ++i) {
      posterior.member(i).sit[c] = updated.sit[i];
      posterior.member(i).sic[c] = updated.sic[i];
    }
  }
  for (auto& m : posterior.members()) post_process(m);
  return posterior;
}

}  // namespace enkfsq

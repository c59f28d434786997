#pragma once

// Analysis step: stochastic EnKF for hard (in-range) data and the EnKF-SQ
// per-member update for soft (out-of-range) data, plus the observation
// preprocessing that distinguishes the benchmark schemes.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "enkfsq/ensemble.hpp"
#include "enkfsq/localization.hpp"
#include "enkfsq/obs_synth.hpp"
#include "enkfsq/random.hpp"

namespace enkfsq {

struct HardData {
  double value = 0.0;
  double sigma_h = 0.0;
};

/// Only known to lie above the detection limit.
struct SoftData {};

struct RangeLimitedObservation {
  std::size_t cell = 0;
  /// Detection limit. Infinite for data that was never range limited
  /// (EnKF-ALL values, climatological pseudo-observations).
  double mu = 0.0;
  std::variant<HardData, SoftData> kind;

  bool is_hard() const { return std::holds_alternative<HardData>(kind); }
  bool is_soft() const { return std::holds_alternative<SoftData>(kind); }
  const HardData& hard() const { return std::get<HardData>(kind); }
};

/// Throws enkfsq::Error unless sigma_h > 0.
RangeLimitedObservation make_hard(std::size_t cell, double value, double sigma_h, double mu);
RangeLimitedObservation make_soft(std::size_t cell, double mu);

/// raw <= mu is Hard(raw, sigma_h), anything above is Soft. The limit itself
/// counts as in range.
RangeLimitedObservation classify_observation(double raw_value, double mu, double sigma_h,
                                             std::size_t cell);

/// Out-of-range likelihood parameters for one observed cell.
struct SqParams {
  double sigma_ir = 0.11;
  double sigma_or_base = 0.75;
  double alpha = 1.0;

  void validate() const;
  /// alpha * sigma_or_base
  double sigma_or() const { return alpha * sigma_or_base; }
};

/// Hard-data error at the detection limit, used as the in-range std of the
/// out-of-range likelihood.
double sigma_ir_at_limit(const ObsErrorModel& m, double mu);

enum class Scheme { EnkfAll, EnkfSq, EnkfClim, EnkfIg, FreeRun };

std::string_view to_string(Scheme s);
/// Accepts the display names ("EnKF-SQ", "Free-run") and loose spellings
/// ("enkf_sq", "sq", "freerun"). Throws enkfsq::Error otherwise.
Scheme parse_scheme(std::string_view name);
inline constexpr Scheme kAllSchemes[] = {Scheme::EnkfAll, Scheme::EnkfSq, Scheme::EnkfClim,
                                         Scheme::EnkfIg, Scheme::FreeRun};

/// Smallest std used for a climatological pseudo-observation.
inline constexpr double kClimatologyStdFloor = 0.01;

struct SchemeObservations {
  std::vector<RangeLimitedObservation> observations;
  /// EnKF-CLIM only: out-of-range values dropped for lack of climatology.
  std::size_t missing_climatology = 0;
};

/// Turns raw collocated values into what a scheme assimilates:
///   EnKF-ALL   every value Hard, error std from the error model, no limit
///   EnKF-SQ    <= mu Hard, > mu Soft
///   EnKF-CLIM  <= mu Hard, > mu replaced by Hard(clim mean, clim std)
///   EnKF-IG    <= mu Hard, > mu dropped
///   Free-run   nothing
/// Hard-data std is evaluated at the observed value.
SchemeObservations apply_scheme(Scheme scheme, std::span<const RawObservation> raw, double mu,
                                const ObsErrorModel& errors, const ClimatologyTable& clim);

/// Member values at one updated cell.
struct LocalColumns {
  std::vector<double> sit;
  std::vector<double> sic;
};

/// Stochastic EnKF update of cell `cell` from a hard observation, with one
/// perturbed observation per member already drawn. Gain is
/// cov / (var_obs + sigma_h^2), identical for all members.
/// Throws if the innovation variance is zero.
LocalColumns enkf_update_local(const Ensemble& prior, std::size_t cell,
                               const RangeLimitedObservation& obs,
                               std::span<const double> perturbed);
/// Draws the perturbed observations from `rng` in member order.
LocalColumns enkf_update_local(const Ensemble& prior, std::size_t cell,
                               const RangeLimitedObservation& obs, RandomStream& rng);

/// EnKF-SQ update from a soft observation. Member i uses
/// R_i = sigma_ir^2 when its observed thickness is <= mu and sigma_or*^2
/// otherwise; forecast covariances are those of the prior ensemble for every
/// member.
LocalColumns enkfsq_update_local(const Ensemble& prior, std::size_t cell,
                                 const RangeLimitedObservation& soft, const SqParams& p,
                                 std::span<const double> perturbed);
/// Draws the perturbed observations from the two-piece likelihood, in
/// member order.
LocalColumns enkfsq_update_local(const Ensemble& prior, std::size_t cell,
                                 const RangeLimitedObservation& soft, const SqParams& p,
                                 RandomStream& rng);

/// Random stream for the perturbation of the observation at `obs_cell` for
/// member `member`.
using PerturbationStreams = std::function<RandomStream(std::size_t member, std::size_t obs_cell)>;

/// Perturbed observation values, one row per observation and one column per
/// member. Hard rows are N(y, sigma_h^2) draws; soft rows are two-piece draws
/// with the observed cell's SqParams.
class PerturbedObservations {
 public:
  PerturbedObservations(std::size_t n_obs, std::size_t n_members)
      : n_members_(n_members), values_(n_obs * n_members) {}

  std::size_t n_members() const { return n_members_; }
  std::span<double> row(std::size_t j) { return {values_.data() + j * n_members_, n_members_}; }
  std::span<const double> row(std::size_t j) const {
    return {values_.data() + j * n_members_, n_members_};
  }

 private:
  std::size_t n_members_;
  std::vector<double> values_;
};

PerturbedObservations perturb_observations(std::span<const RangeLimitedObservation> obs,
                                           std::span<const SqParams> sq_by_cell,
                                           std::size_t n_members,
                                           const PerturbationStreams& streams);

/// Clamps concentration to [0, 1] and negative thickness to 0. Thin ice
/// below the model minimum is left for the model to handle.
void post_process(StateField& s);

/// Localized analysis of the whole grid. Each cell is updated from its single
/// nearest observation within the localization radius (cells with none are
/// left unchanged), using moments of `prior`. The result is post-processed.
/// `sq_by_cell` is only read for soft observations.
Ensemble analyze(const Ensemble& prior, std::span<const RangeLimitedObservation> obs,
                 std::span<const SqParams> sq_by_cell, const LocalizationConfig& loc,
                 const PerturbedObservations& perturbed);

}  // namespace enkfsq

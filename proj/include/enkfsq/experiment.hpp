#pragma once

// Twin experiments on the surrogate model: truth run, synthetic observations,
// cycled ensemble analyses and diagnostics, plus the sensitivity sweeps and
// scheme comparison batches built on top of them.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "enkfsq/diagnostics.hpp"
#include "enkfsq/ensemble.hpp"
#include "enkfsq/filters.hpp"
#include "enkfsq/localization.hpp"
#include "enkfsq/obs_synth.hpp"
#include "enkfsq/surrogate_model.hpp"

namespace enkfsq {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  GridSpec grid{};
  std::size_t ensemble_size = 99;
  std::size_t n_cycles = 20;
  std::size_t days_per_cycle = 7;
  double detection_limit = 1.0;
  double alpha = 1.0;
  Scheme scheme = Scheme::EnkfSq;
  LocalizationConfig localization{};
  ForcingParams forcing{};
  ObsErrorModel obs_error{};
  std::size_t spinup_days = 7;
  /// Day of the seasonal cycle at which the truth run starts; day 0 is the
  /// peak of the growth season.
  int start_day = -67;
  /// Minimum length of the truth run, which also feeds the climatology.
  std::size_t climatology_days = 730;
  /// Std (m) of the smoothed thickness perturbation of the initial members.
  double initial_spread = 0.05;
  /// Std (m) of the smoothed error shared by all initial members, so the
  /// initial ensemble is centred on a background rather than on the truth.
  double background_error = 0.4;
  /// Initial truth thickness pattern: mean + amplitude * shape(x).
  double truth_mean = 1.0;
  double truth_amplitude = 1.0;

  /// Throws enkfsq::Error on any invalid value.
  void validate() const;
  std::size_t assimilation_days() const { return n_cycles * days_per_cycle; }
  std::size_t truth_days() const;
};

/// Flat `key = value` text, `#` starts a comment. Unknown keys and malformed
/// values are errors.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Every key with its resolved value, in the format parse_config reads.
std::string echo_config(const ExperimentConfig& cfg);

/// Initial truth state (day index 0).
StateField initial_truth(const ExperimentConfig& cfg);

/// Truth states for day indices 0..truth_days() inclusive.
std::vector<StateField> run_truth(const ExperimentConfig& cfg);

/// Out-of-range likelihood parameters per cell: sigma_ir from the error model
/// at the limit, sigma_or from the climatology. Cells without climatology use
/// the mean sigma_or of the populated cells.
std::vector<SqParams> sq_params_from_climatology(const ClimatologyTable& clim,
                                                 const ExperimentConfig& cfg);

struct CycleRecord {
  std::size_t cycle = 0;
  std::size_t day = 0;
  double prior_rmse = 0.0;
  double prior_aes = 0.0;
  double posterior_rmse = 0.0;
  double posterior_aes = 0.0;
  double percent_soft = 0.0;
  std::size_t n_raw = 0;
  std::size_t n_assimilated = 0;
};

struct CellSummary {
  double truth = 0.0;
  double prior_mean = 0.0;
  double prior_sd = 0.0;
  double posterior_mean = 0.0;
  double posterior_sd = 0.0;
  double posterior_sic = 0.0;
};

struct VolumeRecord {
  std::size_t day = 0;
  double truth = 0.0;
  double ensemble = 0.0;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<StateField> truth;
  ClimatologyTable climatology;
  std::vector<CycleRecord> cycles;
  std::vector<std::vector<RawObservation>> raw_obs;
  /// Per cycle, per raw observation: what the scheme did with it.
  std::vector<std::vector<std::string>> obs_status;
  std::vector<std::vector<CellSummary>> cell_summaries;
  BinSpec bins;
  BinnedAccumulator prior_rmse_bins{0};
  BinnedAccumulator posterior_bias_bins{0};
  BinnedValues final_skewness;
  std::vector<VolumeRecord> volume;
  std::size_t missing_climatology = 0;
  /// Posterior states with SIT < 0 or SIC outside [0, 1].
  std::size_t physical_violations = 0;
  std::optional<Ensemble> final_posterior;

  double mean_prior_rmse() const;
  double mean_prior_aes() const;
  double mean_posterior_rmse() const;
  double mean_posterior_aes() const;
  /// Weighted total of the pooled posterior conditional bias.
  double total_posterior_bias() const;
};

/// Full cycled twin experiment. Throws enkfsq::Error on invalid config or a
/// non-finite analysis (message carries the cycle index).
RunResult run_twin_experiment(const ExperimentConfig& cfg);

/// Writes config.echo, truth.csv, climatology.csv, obs_cycle_<k>.csv,
/// ensemble_summary.csv, diag.csv, bins_rmse.csv, bins_bias.csv,
/// bins_skew.csv, volume.csv and summary.json into `dir`.
void write_run(const RunResult& r, const std::filesystem::path& dir);

/// Writes config.echo, truth.csv and climatology.csv.
void write_truth(const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct SingleCycleScore {
  double prior_rmse = 0.0;
  double prior_aes = 0.0;
  double posterior_rmse = 0.0;
  double posterior_aes = 0.0;
};

/// Free-running ensemble sampled weekly; at each sample an EnKF-SQ analysis
/// is applied without feeding it back, and the scores are averaged over the
/// samples.
class SingleCycleBench {
 public:
  SingleCycleBench(const ExperimentConfig& cfg, std::size_t max_members);

  /// Time-averaged scores for the first `n_members` members with sigma_or
  /// scaled by `alpha`.
  SingleCycleScore evaluate(double alpha, std::size_t n_members) const;

 private:
  ExperimentConfig cfg_;
  std::vector<StateField> truth_at_cycle_;
  std::vector<Ensemble> priors_;
  std::vector<std::vector<RawObservation>> raw_obs_;
  std::vector<SqParams> sq_;
};

struct SweepRow {
  double parameter = 0.0;
  SingleCycleScore score;
};

std::vector<double> default_alphas();
std::vector<std::size_t> default_ensemble_sizes();
/// `n_seeds` consecutive seeds starting at cfg.seed.
std::vector<std::uint64_t> seed_list(const ExperimentConfig& cfg, std::size_t n_seeds);

/// Seed-averaged single-cycle scores per alpha (EnKF-SQ).
std::vector<SweepRow> run_alpha_sweep(const ExperimentConfig& cfg,
                                      const std::vector<double>& alphas,
                                      const std::vector<std::uint64_t>& seeds);
/// Seed-averaged single-cycle scores per ensemble size (EnKF-SQ, alpha from
/// cfg).
std::vector<SweepRow> run_ensemble_size_sweep(const ExperimentConfig& cfg,
                                              const std::vector<std::size_t>& sizes,
                                              const std::vector<std::uint64_t>& seeds);

void write_sweep(const std::vector<SweepRow>& rows, const std::string& parameter_name,
                 const std::filesystem::path& file);

struct SchemeSummary {
  Scheme scheme = Scheme::FreeRun;
  double prior_rmse = 0.0;
  double prior_aes = 0.0;
  double posterior_rmse = 0.0;
  double posterior_aes = 0.0;
  /// Seed-averaged per-bin values (a bin is empty only if empty for every seed).
  std::vector<std::optional<double>> prior_rmse_bins;
  std::vector<std::optional<double>> posterior_bias_bins;
  std::vector<std::optional<double>> final_skewness_bins;
  double total_bias = 0.0;
  /// Seed-averaged (ensemble - truth) volume per day.
  std::vector<double> volume_difference;
  std::size_t physical_violations = 0;
  std::vector<double> seed_prior_rmse;
};

struct ComparisonResult {
  BinSpec bins;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> volume_days;
  std::vector<SchemeSummary> schemes;

  const SchemeSummary& at(Scheme s) const;
};

/// Runs every scheme for every seed. With a non-empty `out_dir`, each run is
/// written to out_dir/<scheme>/seed_<seed> and the seed-averaged tables to
/// out_dir.
ComparisonResult compare_schemes(const ExperimentConfig& cfg,
                                 const std::vector<std::uint64_t>& seeds,
                                 const std::filesystem::path& out_dir = {});

void write_comparison(const ComparisonResult& c, const std::filesystem::path& dir);

}  // namespace enkfsq

#include "enkfsq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "enkfsq/error.hpp"
#include "enkfsq/io.hpp"
#include "enkfsq/two_piece.hpp"
#include "json.hpp"

namespace enkfsq {

namespace {

int calendar_day(const ExperimentConfig& cfg, std::size_t d) {
  return cfg.start_day + static_cast<int>(d);
}

/// Members with their forcing perturbation state and forcing stream.
struct ForecastEnsemble {
  Ensemble members;
  std::vector<PerturbationState> perturbations;
  std::vector<RandomStream> forcing;
};

ForecastEnsemble initial_ensemble(const ExperimentConfig& cfg, const StateField& truth0,
                                  std::size_t n_members) {
  ForcingParams spread = cfg.forcing;
  spread.perturbation_std = cfg.background_error;
  RandomStream bg = RandomStream::derive(cfg.seed, StreamTag::Background);
  const std::vector<double> background = smoothed_noise(spread, cfg.grid, bg);
  spread.perturbation_std = cfg.initial_spread;
  std::vector<StateField> members;
  std::vector<PerturbationState> perts;
  std::vector<RandomStream> forcing;
  members.reserve(n_members);
  for (std::size_t i = 0; i < n_members; ++i) {
    RandomStream init = RandomStream::derive(cfg.seed, StreamTag::InitialEnsemble, {i});
    const std::vector<double> noise = smoothed_noise(spread, cfg.grid, init);
    StateField m(cfg.grid.n_cells);
    for (std::size_t c = 0; c < m.size(); ++c) {
      double h = truth0.sit[c] + background[c] + noise[c];
      if (h < kMinIceThickness) h = 0.0;
      m.sit[c] = h;
      m.sic[c] = h > 0.0 ? (truth0.sic[c] > 0.0 ? truth0.sic[c] : 1.0) : 0.0;
    }
    members.push_back(std::move(m));
    forcing.push_back(RandomStream::derive(cfg.seed, StreamTag::MemberForcing, {i}));
    perts.push_back(initial_perturbation(cfg.forcing, cfg.grid, forcing.back()));
  }
  return {Ensemble(cfg.grid, std::move(members)), std::move(perts), std::move(forcing)};
}

void propagate_one_day(ForecastEnsemble& fe, const ExperimentConfig& cfg, int day) {
  for (std::size_t i = 0; i < fe.members.size(); ++i) {
    auto [next, pert] = step_member(fe.members.member(i), day, cfg.forcing, fe.perturbations[i],
                                    cfg.grid, fe.forcing[i]);
    fe.members.member(i) = std::move(next);
    fe.perturbations[i] = std::move(pert);
  }
}

PerturbationStreams analysis_streams(std::uint64_t seed, std::size_t cycle) {
  return [seed, cycle](std::size_t member, std::size_t obs_cell) {
    return RandomStream::derive(seed, StreamTag::Analysis, {cycle, member, obs_cell});
  };
}

RandomStream obs_stream(std::uint64_t seed, std::size_t cycle) {
  return RandomStream::derive(seed, StreamTag::ObsNoise, {cycle});
}

Ensemble analyze_with_scheme(const Ensemble& prior, Scheme scheme,
                             const SchemeObservations& so, std::span<const SqParams> sq,
                             const ExperimentConfig& cfg, std::size_t cycle) {
  if (scheme == Scheme::FreeRun || so.observations.empty()) return prior;
  const PerturbedObservations perturbed = perturb_observations(
      so.observations, sq, prior.size(), analysis_streams(cfg.seed, cycle));
  return analyze(prior, so.observations, sq, cfg.localization, perturbed);
}

bool all_finite(const Ensemble& e) {
  for (const auto& m : e.members())
    for (std::size_t c = 0; c < m.size(); ++c)
      if (!std::isfinite(m.sit[c]) || !std::isfinite(m.sic[c])) return false;
  return true;
}

std::size_t count_violations(const Ensemble& e) {
  std::size_t n = 0;
  for (const auto& m : e.members())
    for (std::size_t c = 0; c < m.size(); ++c)
      if (m.sit[c] < 0.0 || m.sic[c] < 0.0 || m.sic[c] > 1.0) ++n;
  return n;
}

std::vector<double> member_sd(const Ensemble& e) {
  std::vector<double> sd(e.grid().n_cells), col(e.size());
  for (std::size_t c = 0; c < sd.size(); ++c) {
    e.gather_sit(c, col);
    sd[c] = std::sqrt(sample_variance(col));
  }
  return sd;
}

std::vector<SqParams> with_alpha(std::vector<SqParams> sq, double alpha) {
  for (auto& p : sq) p.alpha = alpha;
  return sq;
}

std::string status_of(const RawObservation& r, Scheme scheme, double mu,
                      const SchemeObservations& so, double* value, double* sd) {
  for (const auto& o : so.observations) {
    if (o.cell != r.cell) continue;
    if (o.is_soft()) return "soft";
    *value = o.hard().value;
    *sd = o.hard().sigma_h;
    return (scheme == Scheme::EnkfClim && r.value > mu) ? "clim" : "hard";
  }
  return "dropped";
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

void write_truth_csv(const ExperimentConfig& cfg, const std::vector<StateField>& truth,
                     const std::filesystem::path& file) {
  auto f = open_out(file);
  f << "day,calendar_day,cell,sit,sic\n";
  for (std::size_t d = 0; d < truth.size(); ++d)
    for (std::size_t c = 0; c < truth[d].size(); ++c)
      f << d << ',' << calendar_day(cfg, d) << ',' << c << ',' << fmt_double(truth[d].sit[c])
        << ',' << fmt_double(truth[d].sic[c]) << '\n';
}

void write_bins(const BinSpec& bins, const std::vector<std::optional<double>>& values,
                const std::vector<std::size_t>& counts, const std::filesystem::path& file,
                bool flag_first_bin) {
  auto f = open_out(file);
  f << "bin,lo,hi,value,count" << (flag_first_bin ? ",note" : "") << '\n';
  for (std::size_t k = 0; k < bins.n_bins(); ++k) {
    f << bins.label(k) << ',' << fmt_double(bins.edges[k]) << ',' << fmt_double(bins.edges[k + 1])
      << ',';
    if (values[k]) f << fmt_double(*values[k]);
    f << ',' << (k < counts.size() ? counts[k] : 0);
    if (flag_first_bin) f << ',' << (k == 0 ? "below_min_thickness" : "");
    f << '\n';
  }
}

std::vector<std::optional<double>> average_bins(
    const std::vector<std::vector<std::optional<double>>>& per_seed, std::size_t n_bins) {
  std::vector<std::optional<double>> out(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& v : per_seed)
      if (k < v.size() && v[k]) {
        s += *v[k];
        ++n;
      }
    if (n > 0) out[k] = s / static_cast<double>(n);
  }
  return out;
}

nlohmann::json optional_array(const std::vector<std::optional<double>>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& x : v) a.push_back(x ? nlohmann::json(*x) : nlohmann::json(nullptr));
  return a;
}

}  // namespace

StateField initial_truth(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.grid.n_cells;
  StateField s(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double x = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(n);
    const double shape = std::sin(x) + 0.3 * std::sin(3.0 * x + 1.0);
    const double h = cfg.truth_mean + cfg.truth_amplitude * shape;
    if (h >= kMinIceThickness) {
      s.sit[c] = h;
      s.sic[c] = 1.0;
    }
  }
  return s;
}

std::vector<StateField> run_truth(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<StateField> truth;
  truth.reserve(cfg.truth_days() + 1);
  truth.push_back(initial_truth(cfg));
  for (std::size_t d = 1; d <= cfg.truth_days(); ++d)
    truth.push_back(step_truth(truth.back(), calendar_day(cfg, d - 1), cfg.forcing));
  return truth;
}

std::vector<SqParams> sq_params_from_climatology(const ClimatologyTable& clim,
                                                 const ExperimentConfig& cfg) {
  const double mu = cfg.detection_limit;
  const double sigma_ir = sigma_ir_at_limit(cfg.obs_error, mu);
  std::vector<std::optional<double>> sigma_or(cfg.grid.n_cells);
  double total = 0.0;
  std::size_t populated = 0;
  for (std::size_t c = 0; c < sigma_or.size() && c < clim.n_cells(); ++c) {
    if (auto e = clim.at(c)) {
      sigma_or[c] = sigma_or_from_climatology(e->mean_above, mu);
      total += *sigma_or[c];
      ++populated;
    }
  }
  // Without any climatology the likelihood falls back to a symmetric one.
  const double fallback = populated > 0 ? total / static_cast<double>(populated) : sigma_ir;
  std::vector<SqParams> out(cfg.grid.n_cells);
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = SqParams{sigma_ir, sigma_or[c].value_or(fallback), cfg.alpha};
  return out;
}

double RunResult::mean_prior_rmse() const {
  double s = 0.0;
  for (const auto& c : cycles) s += c.prior_rmse;
  return cycles.empty() ? 0.0 : s / static_cast<double>(cycles.size());
}

double RunResult::mean_prior_aes() const {
  double s = 0.0;
  for (const auto& c : cycles) s += c.prior_aes;
  return cycles.empty() ? 0.0 : s / static_cast<double>(cycles.size());
}

double RunResult::mean_posterior_rmse() const {
  double s = 0.0;
  for (const auto& c : cycles) s += c.posterior_rmse;
  return cycles.empty() ? 0.0 : s / static_cast<double>(cycles.size());
}

double RunResult::mean_posterior_aes() const {
  double s = 0.0;
  for (const auto& c : cycles) s += c.posterior_aes;
  return cycles.empty() ? 0.0 : s / static_cast<double>(cycles.size());
}

double RunResult::total_posterior_bias() const {
  const double total = static_cast<double>(posterior_bias_bins.total_count());
  double b = 0.0;
  for (std::size_t k = 0; k < posterior_bias_bins.n_bins(); ++k)
    if (auto m = posterior_bias_bins.mean(k))
      b += static_cast<double>(posterior_bias_bins.count(k)) / total * *m;
  return b;
}

RunResult run_twin_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const double mu = cfg.detection_limit;
  const double cell_area = cfg.grid.cell_area_km2();

  RunResult r;
  r.config = cfg;
  r.truth = run_truth(cfg);
  r.climatology = build_climatology(r.truth, mu);
  const std::vector<SqParams> sq = sq_params_from_climatology(r.climatology, cfg);
  r.bins = BinSpec::standard();
  r.prior_rmse_bins = BinnedAccumulator(r.bins.n_bins());
  r.posterior_bias_bins = BinnedAccumulator(r.bins.n_bins());

  ForecastEnsemble fe = initial_ensemble(cfg, r.truth.front(), cfg.ensemble_size);
  std::size_t d = 0;
  for (; d < cfg.spinup_days; ++d) propagate_one_day(fe, cfg, calendar_day(cfg, d));
  r.volume.push_back({d, ice_volume(r.truth[d], cell_area), ensemble_volume(fe.members, cell_area)});

  for (std::size_t k = 0; k < cfg.n_cycles; ++k) {
    for (std::size_t s = 0; s < cfg.days_per_cycle; ++s) {
      propagate_one_day(fe, cfg, calendar_day(cfg, d));
      ++d;
      if (s + 1 < cfg.days_per_cycle)
        r.volume.push_back(
            {d, ice_volume(r.truth[d], cell_area), ensemble_volume(fe.members, cell_area)});
    }
    const StateField& truth = r.truth[d];
    const Ensemble& prior = fe.members;
    if (!all_finite(prior)) throw Error("non-finite forecast at cycle " + std::to_string(k));
    const StateField prior_mean = ensemble_mean(prior);

    CycleRecord rec;
    rec.cycle = k;
    rec.day = d;
    rec.prior_rmse = rmse(prior_mean.sit, truth.sit);
    rec.prior_aes = aes(prior);

    RandomStream noise = obs_stream(cfg.seed, k);
    std::vector<RawObservation> raw = generate_observations(truth, cfg.obs_error, noise);
    rec.n_raw = raw.size();
    if (!raw.empty()) {
      const SchemeObservations censored =
          apply_scheme(Scheme::EnkfSq, raw, mu, cfg.obs_error, r.climatology);
      rec.percent_soft = percent_soft(censored.observations);
    }
    const SchemeObservations so = apply_scheme(cfg.scheme, raw, mu, cfg.obs_error, r.climatology);
    rec.n_assimilated = so.observations.size();
    r.missing_climatology += so.missing_climatology;

    Ensemble posterior = analyze_with_scheme(prior, cfg.scheme, so, sq, cfg, k);
    if (!all_finite(posterior))
      throw Error("non-finite analysis at cycle " + std::to_string(k));
    r.physical_violations += count_violations(posterior);

    const StateField post_mean = ensemble_mean(posterior);
    rec.posterior_rmse = rmse(post_mean.sit, truth.sit);
    rec.posterior_aes = aes(posterior);
    accumulate_by_observation(r.prior_rmse_bins, prior_mean.sit, truth.sit, raw, r.bins);
    accumulate_by_observation(r.posterior_bias_bins, post_mean.sit, truth.sit, raw, r.bins);
    if (k + 1 == cfg.n_cycles) {
      if (posterior.size() >= 3) {
        r.final_skewness = conditional_skewness(posterior, truth.sit, r.bins);
      } else {
        r.final_skewness.values.assign(r.bins.n_bins(), std::nullopt);
        r.final_skewness.counts.assign(r.bins.n_bins(), 0);
      }
    }

    std::vector<std::string> status;
    status.reserve(raw.size());
    for (const auto& o : raw) {
      double v = 0.0, sd = 0.0;
      status.push_back(status_of(o, cfg.scheme, mu, so, &v, &sd));
    }
    r.obs_status.push_back(std::move(status));
    r.raw_obs.push_back(std::move(raw));

    const std::vector<double> prior_sd = member_sd(prior);
    const std::vector<double> post_sd = member_sd(posterior);
    std::vector<CellSummary> cells(cfg.grid.n_cells);
    for (std::size_t c = 0; c < cells.size(); ++c)
      cells[c] = {truth.sit[c], prior_mean.sit[c], prior_sd[c],
                  post_mean.sit[c], post_sd[c], post_mean.sic[c]};
    r.cell_summaries.push_back(std::move(cells));

    r.volume.push_back({d, ice_volume(truth, cell_area), ensemble_volume(posterior, cell_area)});
    r.cycles.push_back(rec);
    fe.members = std::move(posterior);
  }
  r.final_posterior = fe.members;
  return r;
}

void write_truth(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  cfg.validate();
  std::filesystem::create_directories(dir);
  open_out(dir / "config.echo") << echo_config(cfg);
  const auto truth = run_truth(cfg);
  write_truth_csv(cfg, truth, dir / "truth.csv");
  auto f = open_out(dir / "climatology.csv");
  build_climatology(truth, cfg.detection_limit).write_csv(f);
}

namespace {

void write_run_files(const RunResult& r, const std::filesystem::path& dir, bool with_truth) {
  const ExperimentConfig& cfg = r.config;
  const double mu = cfg.detection_limit;
  std::filesystem::create_directories(dir);
  open_out(dir / "config.echo") << echo_config(cfg);
  if (with_truth) {
    write_truth_csv(cfg, r.truth, dir / "truth.csv");
    auto f = open_out(dir / "climatology.csv");
    r.climatology.write_csv(f);
  }

  {
    const SchemeObservations none;
    for (std::size_t k = 0; k < r.cycles.size(); ++k) {
      auto f = open_out(dir / ("obs_cycle_" + std::to_string(k) + ".csv"));
      f << "cell,truth,raw_value,status,assimilated_value,assimilated_std\n";
      const std::size_t day = r.cycles[k].day;
      const SchemeObservations so =
          apply_scheme(cfg.scheme, r.raw_obs[k], mu, cfg.obs_error, r.climatology);
      for (std::size_t j = 0; j < r.raw_obs[k].size(); ++j) {
        const auto& o = r.raw_obs[k][j];
        double v = 0.0, sd = 0.0;
        const std::string st = status_of(o, cfg.scheme, mu, so, &v, &sd);
        f << o.cell << ',' << fmt_double(r.truth[day].sit[o.cell]) << ',' << fmt_double(o.value)
          << ',' << st << ',';
        if (st == "hard" || st == "clim") f << fmt_double(v) << ',' << fmt_double(sd);
        else f << ',';
        f << '\n';
      }
    }
  }

  {
    auto f = open_out(dir / "ensemble_summary.csv");
    f << "cycle,day,cell,truth,prior_mean,prior_sd,posterior_mean,posterior_sd,"
         "increment,posterior_sic\n";
    for (std::size_t k = 0; k < r.cell_summaries.size(); ++k)
      for (std::size_t c = 0; c < r.cell_summaries[k].size(); ++c) {
        const auto& s = r.cell_summaries[k][c];
        f << k << ',' << r.cycles[k].day << ',' << c << ',' << fmt_double(s.truth) << ','
          << fmt_double(s.prior_mean) << ',' << fmt_double(s.prior_sd) << ','
          << fmt_double(s.posterior_mean) << ',' << fmt_double(s.posterior_sd) << ','
          << fmt_double(s.posterior_mean - s.prior_mean) << ',' << fmt_double(s.posterior_sic)
          << '\n';
      }
  }

  {
    auto f = open_out(dir / "diag.csv");
    f << "cycle,day,calendar_day,prior_rmse,prior_aes,posterior_rmse,posterior_aes,"
         "percent_soft,n_raw,n_assimilated\n";
    for (const auto& c : r.cycles)
      f << c.cycle << ',' << c.day << ',' << calendar_day(cfg, c.day) << ','
        << fmt_double(c.prior_rmse) << ',' << fmt_double(c.prior_aes) << ','
        << fmt_double(c.posterior_rmse) << ',' << fmt_double(c.posterior_aes) << ','
        << fmt_double(c.percent_soft) << ',' << c.n_raw << ',' << c.n_assimilated << '\n';
  }

  std::vector<std::size_t> counts_rmse(r.bins.n_bins()), counts_bias(r.bins.n_bins());
  for (std::size_t k = 0; k < r.bins.n_bins(); ++k) {
    counts_rmse[k] = r.prior_rmse_bins.count(k);
    counts_bias[k] = r.posterior_bias_bins.count(k);
  }
  write_bins(r.bins, r.prior_rmse_bins.rms_values(), counts_rmse, dir / "bins_rmse.csv", false);
  write_bins(r.bins, r.posterior_bias_bins.means(), counts_bias, dir / "bins_bias.csv", false);
  write_bins(r.bins, r.final_skewness.values, r.final_skewness.counts, dir / "bins_skew.csv",
             true);

  {
    auto f = open_out(dir / "volume.csv");
    f << "day,calendar_day,truth_volume,ensemble_volume,difference\n";
    for (const auto& v : r.volume)
      f << v.day << ',' << calendar_day(cfg, v.day) << ',' << fmt_double(v.truth) << ','
        << fmt_double(v.ensemble) << ',' << fmt_double(v.ensemble - v.truth) << '\n';
  }

  {
    nlohmann::json j;
    j["scheme"] = std::string(to_string(cfg.scheme));
    j["seed"] = cfg.seed;
    j["ensemble_size"] = cfg.ensemble_size;
    j["n_cycles"] = cfg.n_cycles;
    j["time_mean_prior_rmse"] = r.mean_prior_rmse();
    j["time_mean_prior_aes"] = r.mean_prior_aes();
    j["time_mean_posterior_rmse"] = r.mean_posterior_rmse();
    j["time_mean_posterior_aes"] = r.mean_posterior_aes();
    j["total_posterior_bias"] = r.total_posterior_bias();
    j["climatology_populated_cells"] = r.climatology.populated();
    j["missing_climatology"] = r.missing_climatology;
    j["physical_violations"] = r.physical_violations;
    nlohmann::json cycles = nlohmann::json::array();
    for (const auto& c : r.cycles)
      cycles.push_back({{"cycle", c.cycle},
                        {"day", c.day},
                        {"prior_rmse", c.prior_rmse},
                        {"prior_aes", c.prior_aes},
                        {"posterior_rmse", c.posterior_rmse},
                        {"posterior_aes", c.posterior_aes},
                        {"percent_soft", c.percent_soft}});
    j["cycles"] = cycles;
    j["bins"]["labels"] = nlohmann::json::array();
    for (std::size_t k = 0; k < r.bins.n_bins(); ++k) j["bins"]["labels"].push_back(r.bins.label(k));
    j["bins"]["prior_rmse"] = optional_array(r.prior_rmse_bins.rms_values());
    j["bins"]["posterior_bias"] = optional_array(r.posterior_bias_bins.means());
    j["bins"]["final_skewness"] = optional_array(r.final_skewness.values);
    open_out(dir / "summary.json") << j.dump(2) << '\n';
  }
}

}  // namespace

void write_run(const RunResult& r, const std::filesystem::path& dir) {
  write_run_files(r, dir, true);
}

SingleCycleBench::SingleCycleBench(const ExperimentConfig& cfg, std::size_t max_members)
    : cfg_(cfg) {
  cfg_.validate();
  const std::vector<StateField> truth = run_truth(cfg_);
  const ClimatologyTable clim = build_climatology(truth, cfg_.detection_limit);
  sq_ = sq_params_from_climatology(clim, cfg_);

  ForecastEnsemble fe = initial_ensemble(cfg_, truth.front(), max_members);
  std::size_t d = 0;
  for (; d < cfg_.spinup_days; ++d) propagate_one_day(fe, cfg_, calendar_day(cfg_, d));
  for (std::size_t k = 0; k < cfg_.n_cycles; ++k) {
    for (std::size_t s = 0; s < cfg_.days_per_cycle; ++s, ++d)
      propagate_one_day(fe, cfg_, calendar_day(cfg_, d));
    truth_at_cycle_.push_back(truth[d]);
    priors_.push_back(fe.members);
    RandomStream noise = obs_stream(cfg_.seed, k);
    raw_obs_.push_back(generate_observations(truth[d], cfg_.obs_error, noise));
  }
}

SingleCycleScore SingleCycleBench::evaluate(double alpha, std::size_t n_members) const {
  if (!(alpha > 0.0)) throw Error("single-cycle bench: alpha must be > 0");
  const std::vector<SqParams> sq = with_alpha(sq_, alpha);
  const ClimatologyTable no_clim;
  SingleCycleScore total;
  for (std::size_t k = 0; k < priors_.size(); ++k) {
    const Ensemble prior = priors_[k].head(n_members);
    const StateField& truth = truth_at_cycle_[k];
    const SchemeObservations so =
        apply_scheme(Scheme::EnkfSq, raw_obs_[k], cfg_.detection_limit, cfg_.obs_error, no_clim);
    const Ensemble post = analyze_with_scheme(prior, Scheme::EnkfSq, so, sq, cfg_, k);
    if (!all_finite(post)) throw Error("non-finite analysis at cycle " + std::to_string(k));
    total.prior_rmse += rmse(ensemble_mean(prior).sit, truth.sit);
    total.prior_aes += aes(prior);
    total.posterior_rmse += rmse(ensemble_mean(post).sit, truth.sit);
    total.posterior_aes += aes(post);
  }
  const double n = static_cast<double>(priors_.size());
  total.prior_rmse /= n;
  total.prior_aes /= n;
  total.posterior_rmse /= n;
  total.posterior_aes /= n;
  return total;
}

std::vector<double> default_alphas() {
  std::vector<double> a;
  for (int k = 1; k <= 30; ++k) a.push_back(0.1 * k);
  return a;
}

std::vector<std::size_t> default_ensemble_sizes() { return {2, 5, 10, 20, 30, 50, 99}; }

std::vector<std::uint64_t> seed_list(const ExperimentConfig& cfg, std::size_t n_seeds) {
  std::vector<std::uint64_t> s(n_seeds);
  for (std::size_t i = 0; i < n_seeds; ++i) s[i] = cfg.seed + i;
  return s;
}

namespace {

void accumulate(SingleCycleScore& into, const SingleCycleScore& s, double w) {
  into.prior_rmse += w * s.prior_rmse;
  into.prior_aes += w * s.prior_aes;
  into.posterior_rmse += w * s.posterior_rmse;
  into.posterior_aes += w * s.posterior_aes;
}

}  // namespace

std::vector<SweepRow> run_alpha_sweep(const ExperimentConfig& cfg,
                                      const std::vector<double>& alphas,
                                      const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw Error("alpha sweep: need at least one seed");
  std::vector<SweepRow> rows(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) rows[a].parameter = alphas[a];
  const double w = 1.0 / static_cast<double>(seeds.size());
  for (std::uint64_t seed : seeds) {
    ExperimentConfig c = cfg;
    c.seed = seed;
    c.scheme = Scheme::EnkfSq;
    const SingleCycleBench bench(c, c.ensemble_size);
    for (std::size_t a = 0; a < alphas.size(); ++a)
      accumulate(rows[a].score, bench.evaluate(alphas[a], c.ensemble_size), w);
  }
  return rows;
}

std::vector<SweepRow> run_ensemble_size_sweep(const ExperimentConfig& cfg,
                                              const std::vector<std::size_t>& sizes,
                                              const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw Error("ensemble size sweep: need at least one seed");
  if (sizes.empty()) return {};
  const std::size_t max_n = *std::max_element(sizes.begin(), sizes.end());
  if (*std::min_element(sizes.begin(), sizes.end()) < 2)
    throw Error("ensemble size sweep: sizes must be >= 2");
  std::vector<SweepRow> rows(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) rows[i].parameter = static_cast<double>(sizes[i]);
  const double w = 1.0 / static_cast<double>(seeds.size());
  for (std::uint64_t seed : seeds) {
    ExperimentConfig c = cfg;
    c.seed = seed;
    c.scheme = Scheme::EnkfSq;
    const SingleCycleBench bench(c, max_n);
    for (std::size_t i = 0; i < sizes.size(); ++i)
      accumulate(rows[i].score, bench.evaluate(c.alpha, sizes[i]), w);
  }
  return rows;
}

void write_sweep(const std::vector<SweepRow>& rows, const std::string& parameter_name,
                 const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  auto f = open_out(file);
  f << parameter_name << ",prior_rmse,prior_aes,posterior_rmse,posterior_aes\n";
  for (const auto& r : rows)
    f << fmt_double(r.parameter) << ',' << fmt_double(r.score.prior_rmse) << ','
      << fmt_double(r.score.prior_aes) << ',' << fmt_double(r.score.posterior_rmse) << ','
      << fmt_double(r.score.posterior_aes) << '\n';
}

const SchemeSummary& ComparisonResult::at(Scheme s) const {
  for (const auto& x : schemes)
    if (x.scheme == s) return x;
  throw Error("comparison: scheme not present");
}

ComparisonResult compare_schemes(const ExperimentConfig& cfg,
                                 const std::vector<std::uint64_t>& seeds,
                                 const std::filesystem::path& out_dir) {
  if (seeds.empty()) throw Error("compare-schemes: need at least one seed");
  ComparisonResult out;
  out.bins = BinSpec::standard();
  out.seeds = seeds;
  const double w = 1.0 / static_cast<double>(seeds.size());
  for (Scheme scheme : kAllSchemes) {
    SchemeSummary sum;
    sum.scheme = scheme;
    std::vector<std::vector<std::optional<double>>> rmse_bins, bias_bins, skew_bins;
    for (std::uint64_t seed : seeds) {
      ExperimentConfig c = cfg;
      c.seed = seed;
      c.scheme = scheme;
      const RunResult r = run_twin_experiment(c);
      if (!out_dir.empty()) {
        std::string name(to_string(scheme));
        write_run_files(r, out_dir / name / ("seed_" + std::to_string(seed)), false);
      }
      sum.prior_rmse += w * r.mean_prior_rmse();
      sum.prior_aes += w * r.mean_prior_aes();
      sum.posterior_rmse += w * r.mean_posterior_rmse();
      sum.posterior_aes += w * r.mean_posterior_aes();
      sum.total_bias += w * r.total_posterior_bias();
      sum.seed_prior_rmse.push_back(r.mean_prior_rmse());
      sum.physical_violations += r.physical_violations;
      rmse_bins.push_back(r.prior_rmse_bins.rms_values());
      bias_bins.push_back(r.posterior_bias_bins.means());
      skew_bins.push_back(r.final_skewness.values);
      if (sum.volume_difference.empty()) sum.volume_difference.assign(r.volume.size(), 0.0);
      if (out.volume_days.empty())
        for (const auto& v : r.volume) out.volume_days.push_back(v.day);
      for (std::size_t t = 0; t < r.volume.size(); ++t)
        sum.volume_difference[t] += w * (r.volume[t].ensemble - r.volume[t].truth);
    }
    sum.prior_rmse_bins = average_bins(rmse_bins, out.bins.n_bins());
    sum.posterior_bias_bins = average_bins(bias_bins, out.bins.n_bins());
    sum.final_skewness_bins = average_bins(skew_bins, out.bins.n_bins());
    out.schemes.push_back(std::move(sum));
  }
  if (!out_dir.empty()) {
    ExperimentConfig c = cfg;
    write_truth(c, out_dir);
    write_comparison(out, out_dir);
  }
  return out;
}

void write_comparison(const ComparisonResult& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto f = open_out(dir / "compare.csv");
    f << "scheme,prior_rmse,prior_aes,posterior_rmse,posterior_aes,total_posterior_bias,"
         "physical_violations\n";
    for (const auto& s : c.schemes)
      f << to_string(s.scheme) << ',' << fmt_double(s.prior_rmse) << ','
        << fmt_double(s.prior_aes) << ',' << fmt_double(s.posterior_rmse) << ','
        << fmt_double(s.posterior_aes) << ',' << fmt_double(s.total_bias) << ','
        << s.physical_violations << '\n';
  }
  {
    auto f = open_out(dir / "compare_seeds.csv");
    f << "scheme,seed,prior_rmse\n";
    for (const auto& s : c.schemes)
      for (std::size_t i = 0; i < s.seed_prior_rmse.size(); ++i)
        f << to_string(s.scheme) << ',' << c.seeds[i] << ',' << fmt_double(s.seed_prior_rmse[i])
          << '\n';
  }
  auto bin_table = [&](const char* file, auto member) {
    auto f = open_out(dir / file);
    f << "bin,lo,hi";
    for (const auto& s : c.schemes) f << ',' << to_string(s.scheme);
    f << '\n';
    for (std::size_t k = 0; k < c.bins.n_bins(); ++k) {
      f << c.bins.label(k) << ',' << fmt_double(c.bins.edges[k]) << ','
        << fmt_double(c.bins.edges[k + 1]);
      for (const auto& s : c.schemes) {
        f << ',';
        if (const auto& v = (s.*member)[k]) f << fmt_double(*v);
      }
      f << '\n';
    }
  };
  bin_table("bins_rmse.csv", &SchemeSummary::prior_rmse_bins);
  bin_table("bins_bias.csv", &SchemeSummary::posterior_bias_bins);
  bin_table("bins_skew.csv", &SchemeSummary::final_skewness_bins);
  {
    auto f = open_out(dir / "volume_difference.csv");
    f << "day";
    for (const auto& s : c.schemes) f << ',' << to_string(s.scheme);
    f << '\n';
    for (std::size_t t = 0; t < c.volume_days.size(); ++t) {
      f << c.volume_days[t];
      for (const auto& s : c.schemes) f << ',' << fmt_double(s.volume_difference[t]);
      f << '\n';
    }
  }
}

}  // namespace enkfsq

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "enkfsq/error.hpp"
#include "enkfsq/experiment.hpp"
#include "enkfsq/io.hpp"
#include "enkfsq/kernels.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<std::string> scheme;
  std::optional<double> alpha;
  std::optional<std::size_t> n;
  std::optional<std::size_t> cycles;
  std::size_t seeds = 1;
  std::string kernels = "auto";
};

enkfsq::ExperimentConfig resolve(const Options& o) {
  enkfsq::ExperimentConfig cfg;
  if (!o.config.empty()) cfg = enkfsq::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.scheme) cfg.scheme = enkfsq::parse_scheme(*o.scheme);
  if (o.alpha) cfg.alpha = *o.alpha;
  if (o.n) cfg.ensemble_size = *o.n;
  if (o.cycles) cfg.n_cycles = *o.cycles;
  cfg.validate();
  return cfg;
}

void select_kernels(const std::string& name) {
  using enkfsq::kernels::Backend;
  if (name == "auto") return;
  if (name == "scalar") enkfsq::kernels::force_backend(Backend::Scalar);
  else if (name == "avx2") enkfsq::kernels::force_backend(Backend::Avx2);
  else if (name == "neon") enkfsq::kernels::force_backend(Backend::Neon);
  else throw enkfsq::Error("unknown kernel backend '" + name + "'");
}

void print_sweep(const std::vector<enkfsq::SweepRow>& rows, const char* name) {
  std::cout << name << " prior_rmse prior_aes posterior_rmse posterior_aes\n";
  for (const auto& r : rows)
    std::cout << r.parameter << ' ' << r.score.prior_rmse << ' ' << r.score.prior_aes << ' '
              << r.score.posterior_rmse << ' ' << r.score.posterior_aes << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EnKF-SQ twin experiments on a surrogate sea-ice model"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "flat key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "root seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--scheme", o.scheme, "EnKF_ALL | EnKF_SQ | EnKF_CLIM | EnKF_IG | FreeRun");
    sub->add_option("--alpha", o.alpha, "sigma_or multiplier");
    sub->add_option("--n", o.n, "ensemble size");
    sub->add_option("--cycles", o.cycles, "number of weekly cycles");
    sub->add_option("--seeds", o.seeds, "number of consecutive seeds to average")
        ->check(CLI::PositiveNumber);
    sub->add_option("--kernels", o.kernels, "auto | scalar | avx2 | neon");
  };

  auto* truth = app.add_subcommand("truth", "write the truth run and its climatology");
  auto* run = app.add_subcommand("run", "one cycled twin experiment");
  auto* sweep_alpha = app.add_subcommand("sweep-alpha", "single-cycle alpha sensitivity");
  auto* sweep_n = app.add_subcommand("sweep-n", "single-cycle ensemble size sensitivity");
  auto* compare = app.add_subcommand("compare-schemes", "all schemes over several seeds");
  for (auto* s : {truth, run, sweep_alpha, sweep_n, compare}) add_common(s);

  CLI11_PARSE(app, argc, argv);

  try {
    select_kernels(o.kernels);
    const enkfsq::ExperimentConfig cfg = resolve(o);
    const std::filesystem::path out = o.out;
    if (truth->parsed()) {
      enkfsq::write_truth(cfg, out);
    } else if (run->parsed()) {
      const auto r = enkfsq::run_twin_experiment(cfg);
      enkfsq::write_run(r, out);
      std::cout << enkfsq::to_string(cfg.scheme) << " prior_rmse " << r.mean_prior_rmse()
                << " posterior_rmse " << r.mean_posterior_rmse() << '\n';
    } else if (sweep_alpha->parsed()) {
      const auto rows =
          enkfsq::run_alpha_sweep(cfg, enkfsq::default_alphas(), enkfsq::seed_list(cfg, o.seeds));
      enkfsq::write_sweep(rows, "alpha", out / "sweep_alpha.csv");
      print_sweep(rows, "alpha");
    } else if (sweep_n->parsed()) {
      const auto rows = enkfsq::run_ensemble_size_sweep(cfg, enkfsq::default_ensemble_sizes(),
                                                        enkfsq::seed_list(cfg, o.seeds));
      enkfsq::write_sweep(rows, "ensemble_size", out / "sweep_n.csv");
      print_sweep(rows, "N");
    } else if (compare->parsed()) {
      const auto c = enkfsq::compare_schemes(cfg, enkfsq::seed_list(cfg, o.seeds), out);
      for (const auto& s : c.schemes)
        std::cout << enkfsq::to_string(s.scheme) << " prior_rmse " << s.prior_rmse
                  << " prior_aes " << s.prior_aes << " total_bias " << s.total_bias << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "enkfsq: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

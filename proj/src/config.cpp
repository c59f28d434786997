#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "enkfsq/error.hpp"
#include "enkfsq/experiment.hpp"
#include "enkfsq/io.hpp"

namespace enkfsq {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw Error("config: bad value '" + std::string(v) + "' for key '" + std::string(key) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error("config: bad boolean '" + std::string(v) + "' for key '" + std::string(key) + "'");
}

struct Key {
  std::string name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Key number_key(std::string name, T ExperimentConfig::*member) {
  return {name,
          [name, member](ExperimentConfig& c, std::string_view v) {
            c.*member = parse_number<T>(name, v);
          },
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return fmt_double(c.*member);
            else return std::to_string(c.*member);
          }};
}

template <typename Outer, typename T>
Key nested_key(std::string name, Outer ExperimentConfig::*outer, T Outer::*member) {
  return {name,
          [name, outer, member](ExperimentConfig& c, std::string_view v) {
            (c.*outer).*member = parse_number<T>(name, v);
          },
          [outer, member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return fmt_double((c.*outer).*member);
            else return std::to_string((c.*outer).*member);
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(number_key("seed", &ExperimentConfig::seed));
    k.push_back(nested_key("n_cells", &ExperimentConfig::grid, &GridSpec::n_cells));
    k.push_back(nested_key("cell_spacing_km", &ExperimentConfig::grid, &GridSpec::cell_spacing_km));
    k.push_back({"periodic",
                 [](ExperimentConfig& c, std::string_view v) {
                   c.grid.periodic = parse_bool("periodic", v);
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(c.grid.periodic ? "true" : "false");
                 }});
    k.push_back(number_key("ensemble_size", &ExperimentConfig::ensemble_size));
    k.push_back(number_key("n_cycles", &ExperimentConfig::n_cycles));
    k.push_back(number_key("days_per_cycle", &ExperimentConfig::days_per_cycle));
    k.push_back(number_key("detection_limit", &ExperimentConfig::detection_limit));
    k.push_back(number_key("alpha", &ExperimentConfig::alpha));
    k.push_back({"scheme",
                 [](ExperimentConfig& c, std::string_view v) { c.scheme = parse_scheme(v); },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.scheme)); }});
    k.push_back(nested_key("radius_km", &ExperimentConfig::localization,
                           &LocalizationConfig::radius_km));
    k.push_back(nested_key("growth_amplitude", &ExperimentConfig::forcing,
                           &ForcingParams::growth_amplitude));
    k.push_back(nested_key("season_length", &ExperimentConfig::forcing,
                           &ForcingParams::season_length));
    k.push_back(nested_key("advection_speed", &ExperimentConfig::forcing,
                           &ForcingParams::advection_speed));
    k.push_back(nested_key("perturbation_std", &ExperimentConfig::forcing,
                           &ForcingParams::perturbation_std));
    k.push_back(nested_key("time_decorrelation", &ExperimentConfig::forcing,
                           &ForcingParams::time_decorrelation));
    k.push_back(nested_key("space_decorrelation_km", &ExperimentConfig::forcing,
                           &ForcingParams::space_decorrelation_km));
    k.push_back(nested_key("max_thickness", &ExperimentConfig::forcing,
                           &ForcingParams::max_thickness));
    k.push_back(nested_key("sic_relaxation_rate", &ExperimentConfig::forcing,
                           &ForcingParams::sic_relaxation_rate));
    k.push_back(nested_key("obs_error_slope", &ExperimentConfig::obs_error, &ObsErrorModel::slope));
    k.push_back(nested_key("obs_error_intercept", &ExperimentConfig::obs_error,
                           &ObsErrorModel::intercept));
    k.push_back(number_key("spinup_days", &ExperimentConfig::spinup_days));
    k.push_back(number_key("start_day", &ExperimentConfig::start_day));
    k.push_back(number_key("climatology_days", &ExperimentConfig::climatology_days));
    k.push_back(number_key("initial_spread", &ExperimentConfig::initial_spread));
    k.push_back(number_key("background_error", &ExperimentConfig::background_error));
    k.push_back(number_key("truth_mean", &ExperimentConfig::truth_mean));
    k.push_back(number_key("truth_amplitude", &ExperimentConfig::truth_amplitude));
    return k;
  }();
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  grid.validate();
  if (!grid.periodic) throw Error("config: only periodic grids are supported");
  if (ensemble_size < 2) throw Error("config: ensemble_size must be >= 2");
  if (n_cycles < 1) throw Error("config: n_cycles must be >= 1");
  if (days_per_cycle < 1) throw Error("config: days_per_cycle must be >= 1");
  if (!(detection_limit > 0.0)) throw Error("config: detection_limit must be > 0");
  if (!(alpha > 0.0)) throw Error("config: alpha must be > 0");
  if (!(initial_spread >= 0.0)) throw Error("config: initial_spread must be >= 0");
  if (!(background_error >= 0.0)) throw Error("config: background_error must be >= 0");
  if (!(truth_mean >= 0.0) || !(truth_amplitude >= 0.0))
    throw Error("config: truth_mean and truth_amplitude must be >= 0");
  localization.validate();
  forcing.validate();
  obs_error.validate();
}

std::size_t ExperimentConfig::truth_days() const {
  return std::max(spinup_days + assimilation_days(), climatology_days);
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos)
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string_view key = trim(v.substr(0, eq));
    const std::string_view value = trim(v.substr(eq + 1));
    bool found = false;
    for (const auto& k : keys()) {
      if (k.name == key) {
        k.set(cfg, value);
        found = true;
        break;
      }
    }
    if (!found)
      throw Error("config line " + std::to_string(lineno) + ": unknown key '" +
                  std::string(key) + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open config file " + path.string());
  return parse_config(f);
}

std::string echo_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  for (const auto& k : keys()) os << k.name << " = " << k.get(cfg) << '\n';
  return os.str();
}

}  // namespace enkfsq

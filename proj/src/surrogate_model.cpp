#include "enkfsq/surrogate_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "enkfsq/error.hpp"

namespace enkfsq {

namespace {

// Shared daily step; growth and drift are scaled per cell by (1 + pert[c]),
// or left as is when pert is empty.
StateField advance(const StateField& s, int day, const ForcingParams& p,
                   const std::vector<double>& pert) {
  const std::size_t n = s.size();
  const double g = growth_rate(day, p);
  auto factor = [&](std::size_t c) { return pert.empty() ? 1.0 : 1.0 + pert[c]; };

  // Thermodynamics.
  std::vector<double> h(n), g_eff(n);
  for (std::size_t c = 0; c < n; ++c) {
    g_eff[c] = g * factor(c);
    const double h0 = s.sit[c];
    double dh = g_eff[c] * (1.0 - h0 / p.max_thickness);
    if (h0 <= 0.0 && dh < 0.0) dh = 0.0;
    h[c] = std::max(h0 + dh, 0.0);
  }

  // Semi-Lagrangian advection of thickness and concentration.
  StateField out(n);
  const double nd = static_cast<double>(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double u = p.advection_speed * factor(c);
    double x = static_cast<double>(c) - u;
    x -= nd * std::floor(x / nd);
    const double x0 = std::floor(x);
    const double w = x - x0;
    const std::size_t i0 = static_cast<std::size_t>(x0) % n;
    const std::size_t i1 = (i0 + 1) % n;
    out.sit[c] = (1.0 - w) * h[i0] + w * h[i1];
    out.sic[c] = (1.0 - w) * s.sic[i0] + w * s.sic[i1];
  }

  for (std::size_t c = 0; c < n; ++c) {
    double& hc = out.sit[c];
    double& ac = out.sic[c];
    const bool growing = g_eff[c] > 0.0 && hc < p.max_thickness;
    if (growing) ac += p.sic_relaxation_rate * (1.0 - ac);
    else if (hc < kMinIceThickness) ac -= p.sic_relaxation_rate * ac;

    if (hc < kMinIceThickness) {
      if (g_eff[c] > 0.0) {
        hc = kMinIceThickness;
      } else {
        hc = 0.0;
        ac = 0.0;
      }
    }
    ac = std::clamp(ac, 0.0, 1.0);
  }
  return out;
}

}  // namespace

void ForcingParams::validate() const {
  if (!(growth_amplitude >= 0.0)) throw Error("forcing: growth_amplitude must be >= 0");
  if (!(season_length > 0.0)) throw Error("forcing: season_length must be > 0");
  if (!std::isfinite(advection_speed)) throw Error("forcing: advection_speed must be finite");
  if (!(perturbation_std >= 0.0)) throw Error("forcing: perturbation_std must be >= 0");
  if (!(time_decorrelation > 0.0)) throw Error("forcing: time_decorrelation must be > 0");
  if (!(space_decorrelation_km > 0.0)) throw Error("forcing: space_decorrelation must be > 0");
  if (!(max_thickness > kMinIceThickness)) throw Error("forcing: max_thickness too small");
  if (!(sic_relaxation_rate >= 0.0 && sic_relaxation_rate <= 1.0))
    throw Error("forcing: sic_relaxation_rate must be in [0, 1]");
}

double growth_rate(int day, const ForcingParams& p) {
  return p.growth_amplitude *
         std::cos(2.0 * std::numbers::pi * static_cast<double>(day) / p.season_length);
}

StateField step_truth(const StateField& s, int day, const ForcingParams& p) {
  return advance(s, day, p, {});
}

std::size_t smoothing_window(const ForcingParams& p, const GridSpec& grid) {
  const auto w = static_cast<std::size_t>(std::lround(p.space_decorrelation_km / grid.cell_spacing_km));
  return std::clamp<std::size_t>(w, 1, grid.n_cells);
}

std::vector<double> smoothed_noise(const ForcingParams& p, const GridSpec& grid,
                                   RandomStream& rng) {
  const std::size_t n = grid.n_cells;
  std::vector<double> white(n);
  for (auto& v : white) v = rng.normal();
  const std::size_t w = smoothing_window(p, grid);
  const std::size_t half = w / 2;
  const double scale = p.perturbation_std / std::sqrt(static_cast<double>(w));
  std::vector<double> out(n);
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t k = 0; k < w; ++k) s += white[(c + n - half + k) % n];
    out[c] = scale * s;
  }
  return out;
}

PerturbationState evolve_perturbation(const PerturbationState& pert, const ForcingParams& p,
                                      const GridSpec& grid, RandomStream& rng) {
  const double a = std::exp(-1.0 / p.time_decorrelation);
  const double b = std::sqrt(1.0 - a * a);
  std::vector<double> eps = smoothed_noise(p, grid, rng);
  PerturbationState next{std::vector<double>(grid.n_cells)};
  for (std::size_t c = 0; c < grid.n_cells; ++c) {
    const double prev = pert.field.empty() ? 0.0 : pert.field[c];
    next.field[c] = a * prev + b * eps[c];
  }
  return next;
}

PerturbationState initial_perturbation(const ForcingParams& p, const GridSpec& grid,
                                       RandomStream& rng) {
  return {smoothed_noise(p, grid, rng)};
}

std::pair<StateField, PerturbationState> step_member(const StateField& s, int day,
                                                     const ForcingParams& p,
                                                     const PerturbationState& pert,
                                                     const GridSpec& grid, RandomStream& rng) {
  PerturbationState next = evolve_perturbation(pert, p, grid, rng);
  StateField out = advance(s, day, p, next.field);
  return {std::move(out), std::move(next)};
}

}  // namespace enkfsq

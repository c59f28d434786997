#pragma once

// Seasonal sea ice surrogate on a 1-D periodic grid. Daily steps:
//   1. thermodynamics   dh = g (1 - h / h_max), g = A cos(2 pi day / L)
//   2. advection        semi-Lagrangian shift by u cells/day, linear
//                       interpolation, periodic
//   3. concentration    relaxes towards 1 where ice grows and towards 0 where
//                       the ice is thinner than the model minimum
//   4. minimum rule     ice thinner than 0.10 m melts to open water when
//                       g <= 0 and is raised to 0.10 m when g > 0
// Ensemble members scale g and u per cell by (1 + p), where p is an AR(1)
// field of spatially smoothed Gaussian noise.

#include <cstddef>
#include <utility>
#include <vector>

#include "enkfsq/ensemble.hpp"
#include "enkfsq/random.hpp"

namespace enkfsq {

inline constexpr double kMinIceThickness = 0.10;

struct ForcingParams {
  double growth_amplitude = 0.008;  // m/day
  double season_length = 365.0;    // days
  double advection_speed = 1.0;    // cells/day
  double perturbation_std = 0.35;
  double time_decorrelation = 2.0;        // days
  double space_decorrelation_km = 250.0;  // km
  double max_thickness = 4.0;             // m
  double sic_relaxation_rate = 0.05;      // 1/day

  void validate() const;
};

struct PerturbationState {
  std::vector<double> field;
};

/// g(day) for unperturbed forcing.
double growth_rate(int day, const ForcingParams& p);

StateField step_truth(const StateField& s, int day, const ForcingParams& p);

/// Moving-average window, in cells, for the spatial smoothing of the noise.
std::size_t smoothing_window(const ForcingParams& p, const GridSpec& grid);

/// Spatially correlated N(0, perturbation_std^2) field.
std::vector<double> smoothed_noise(const ForcingParams& p, const GridSpec& grid,
                                   RandomStream& rng);

/// p' = a p + sqrt(1 - a^2) eps, a = exp(-1 / time_decorrelation).
PerturbationState evolve_perturbation(const PerturbationState& pert, const ForcingParams& p,
                                      const GridSpec& grid, RandomStream& rng);

/// Draw from the stationary distribution of the AR(1) process.
PerturbationState initial_perturbation(const ForcingParams& p, const GridSpec& grid,
                                       RandomStream& rng);

/// One daily step of a member with perturbed growth and drift. The
/// perturbation is advanced first and the step uses the new field.
std::pair<StateField, PerturbationState> step_member(const StateField& s, int day,
                                                     const ForcingParams& p,
                                                     const PerturbationState& pert,
                                                     const GridSpec& grid, RandomStream& rng);

}  // namespace enkfsq

#pragma once

#include "enkfsq/random.hpp"

namespace enkfsq {

/// Two-piece Gaussian: two half-Gaussians with different standard deviations
/// joined at a common mode. Used as the likelihood of an observation that is
/// only known to lie beyond the detection limit `mu`.
///
///   f(x) = w exp(-(x-mu)^2 / (2 sigma_ir^2))   for x <= mu
///   f(x) = w exp(-(x-mu)^2 / (2 sigma_or^2))   for x >  mu
///   w    = sqrt(2/pi) / (sigma_ir + sigma_or)
class TwoPieceGaussian {
 public:
  /// Throws enkfsq::Error if either std is not strictly positive or mu is not
  /// finite.
  TwoPieceGaussian(double mu, double sigma_ir, double sigma_or);

  double mu() const { return mu_; }
  double sigma_ir() const { return sigma_ir_; }
  double sigma_or() const { return sigma_or_; }
  /// Normalizing constant, equal to the density at the mode.
  double weight() const { return weight_; }

  double pdf(double x) const;

  /// Draws one value. The in-range half is chosen with probability
  /// sigma_ir / (sigma_ir + sigma_or), then a half-normal magnitude is taken
  /// on that side. When both stds are equal the density is N(mu, sigma^2) and
  /// a single normal draw is consumed, matching a hard-data perturbation.
  double sample(RandomStream& rng) const;

  /// mu + sqrt(2/pi) (sigma_or - sigma_ir)
  double mean() const;

  /// P(X <= mu)
  double in_range_probability() const { return sigma_ir_ / (sigma_ir_ + sigma_or_); }

 private:
  double mu_;
  double sigma_ir_;
  double sigma_or_;
  double weight_;
};

/// Out-of-range std from the climatological mean of values above the limit.
/// Throws enkfsq::Error when clim_mean_above <= mu.
double sigma_or_from_climatology(double clim_mean_above, double mu);

}  // namespace enkfsq

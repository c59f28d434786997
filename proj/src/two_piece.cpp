#include "enkfsq/two_piece.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "enkfsq/error.hpp"

namespace enkfsq {

namespace {

const double kSqrtTwoOverPi = std::sqrt(2.0 / std::numbers::pi);

}  // namespace

TwoPieceGaussian::TwoPieceGaussian(double mu, double sigma_ir, double sigma_or)
    : mu_(mu), sigma_ir_(sigma_ir), sigma_or_(sigma_or) {
  if (!std::isfinite(mu)) throw Error("two-piece gaussian: mu must be finite");
  if (!(sigma_ir > 0.0) || !std::isfinite(sigma_ir))
    throw Error("two-piece gaussian: sigma_ir must be > 0, got " + std::to_string(sigma_ir));
  if (!(sigma_or > 0.0) || !std::isfinite(sigma_or))
    throw Error("two-piece gaussian: sigma_or must be > 0, got " + std::to_string(sigma_or));
  weight_ = kSqrtTwoOverPi / (sigma_ir + sigma_or);
}

double TwoPieceGaussian::pdf(double x) const {
  const double d = x - mu_;
  const double s = d <= 0.0 ? sigma_ir_ : sigma_or_;
  return weight_ * std::exp(-(d * d) / (2.0 * s * s));
}

double TwoPieceGaussian::sample(RandomStream& rng) const {
  if (sigma_ir_ == sigma_or_) return mu_ + sigma_ir_ * rng.normal();
  const bool in_range = rng.uniform() < in_range_probability();
  const double z = std::abs(rng.normal());
  return in_range ? mu_ - z * sigma_ir_ : mu_ + z * sigma_or_;
}

double TwoPieceGaussian::mean() const {
  return mu_ + kSqrtTwoOverPi * (sigma_or_ - sigma_ir_);
}

double sigma_or_from_climatology(double clim_mean_above, double mu) {
  if (!(clim_mean_above > mu))
    throw Error("sigma_or: climatological mean above the limit (" +
                std::to_string(clim_mean_above) + ") must exceed the limit (" +
                std::to_string(mu) + ")");
  return clim_mean_above - mu;
}

}  // namespace enkfsq

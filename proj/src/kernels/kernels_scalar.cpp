#include <cstddef>

#include "enkfsq/kernels.hpp"

namespace enkfsq::kernels::scalar {

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

double centered_dot(std::span<const double> a, double mean_a, std::span<const double> b,
                    double mean_b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - mean_a) * (b[i] - mean_b);
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void gain_update(std::span<double> x, std::span<const double> gain,
                 std::span<const double> innovation) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += gain[i] * innovation[i];
}

}  // namespace enkfsq::kernels::scalar

#include "enkfsq/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstddef>

namespace enkfsq::kernels::neon {

double sum(std::span<const double> a) {
  const std::size_t n = a.size();
  const double* p = a.data();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(p + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += p[i];
  return s;
}

double centered_dot(std::span<const double> a, double mean_a, std::span<const double> b,
                    double mean_b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  const float64x2_t ma = vdupq_n_f64(mean_a);
  const float64x2_t mb = vdupq_n_f64(mean_b);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t da = vsubq_f64(vld1q_f64(pa + i), ma);
    const float64x2_t db = vsubq_f64(vld1q_f64(pb + i), mb);
    acc = vaddq_f64(acc, vmulq_f64(da, db));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += (pa[i] - mean_a) * (pb[i] - mean_b);
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(pa + i), vld1q_f64(pb + i));
    acc = vaddq_f64(acc, vmulq_f64(d, d));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = pa[i] - pb[i];
    s += d * d;
  }
  return s;
}

void gain_update(std::span<double> x, std::span<const double> gain,
                 std::span<const double> innovation) {
  const std::size_t n = x.size();
  double* px = x.data();
  const double* pg = gain.data();
  const double* pd = innovation.data();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t inc = vmulq_f64(vld1q_f64(pg + i), vld1q_f64(pd + i));
    vst1q_f64(px + i, vaddq_f64(vld1q_f64(px + i), inc));
  }
  for (; i < n; ++i) px[i] += pg[i] * pd[i];
}

}  // namespace enkfsq::kernels::neon

#endif

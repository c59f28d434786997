#include "enkfsq/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstddef>

namespace enkfsq::kernels::avx2 {

namespace {

__attribute__((target("avx2"))) inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

__attribute__((target("avx2"))) double sum(std::span<const double> a) {
  const std::size_t n = a.size();
  const double* p = a.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(p + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += p[i];
  return s;
}

__attribute__((target("avx2"))) double centered_dot(std::span<const double> a, double mean_a,
                                                     std::span<const double> b,
                                                     double mean_b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  const __m256d ma = _mm256_set1_pd(mean_a);
  const __m256d mb = _mm256_set1_pd(mean_b);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d da = _mm256_sub_pd(_mm256_loadu_pd(pa + i), ma);
    const __m256d db = _mm256_sub_pd(_mm256_loadu_pd(pb + i), mb);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(da, db));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += (pa[i] - mean_a) * (pb[i] - mean_b);
  return s;
}

__attribute__((target("avx2"))) double squared_distance(std::span<const double> a,
                                                         std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = pa[i] - pb[i];
    s += d * d;
  }
  return s;
}

// Separate mul and add (no FMA) so results match the scalar kernel bit for bit.
__attribute__((target("avx2"))) void gain_update(std::span<double> x,
                                                  std::span<const double> gain,
                                                  std::span<const double> innovation) {
  const std::size_t n = x.size();
  double* px = x.data();
  const double* pg = gain.data();
  const double* pd = innovation.data();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d inc = _mm256_mul_pd(_mm256_loadu_pd(pg + i), _mm256_loadu_pd(pd + i));
    _mm256_storeu_pd(px + i, _mm256_add_pd(_mm256_loadu_pd(px + i), inc));
  }
  for (; i < n; ++i) px[i] += pg[i] * pd[i];
}

}  // namespace enkfsq::kernels::avx2

#endif

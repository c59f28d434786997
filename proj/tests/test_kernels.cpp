#include <cmath>
#include <vector>

#include "doctest.h"
#include "enkfsq/error.hpp"
#include "enkfsq/kernels.hpp"
#include "enkfsq/random.hpp"

using namespace enkfsq;
namespace k = enkfsq::kernels;

namespace {

std::vector<double> randoms(std::size_t n, std::uint64_t seed) {
  RandomStream rng = RandomStream::derive(seed, StreamTag::Test, {n});
  std::vector<double> v(n);
  for (auto& x : v) x = 1.3 + 0.8 * rng.normal();
  return v;
}

double naive_sum(const std::vector<double>& a) {
  long double s = 0.0L;
  for (double x : a) s += x;
  return static_cast<double>(s);
}

void check_close(double got, double ref, double scale) {
  CHECK(std::abs(got - ref) <= 1e-12 * std::max(1.0, scale));
}

const std::vector<k::Backend> kAll{k::Backend::Scalar, k::Backend::Avx2, k::Backend::Neon};

}  // namespace

TEST_CASE("scalar kernels match extended-precision loops") {
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 99u, 1000u}) {
    const auto a = randoms(n, 1), b = randoms(n, 2);
    check_close(k::scalar::sum(a), naive_sum(a), std::abs(naive_sum(a)));
    long double cd = 0.0L, sd = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      cd += (static_cast<long double>(a[i]) - 1.0L) * (b[i] - 2.0L);
      sd += (static_cast<long double>(a[i]) - b[i]) * (a[i] - b[i]);
    }
    check_close(k::scalar::centered_dot(a, 1.0, b, 2.0), static_cast<double>(cd), n);
    check_close(k::scalar::squared_distance(a, b), static_cast<double>(sd), n);
  }
}

TEST_CASE("every available backend agrees with the scalar reference") {
  for (k::Backend be : kAll) {
    if (!k::backend_available(be)) continue;
    CAPTURE(k::backend_name(be));
    k::force_backend(be);
    CHECK(k::active_backend() == be);
    for (std::size_t n = 0; n < 70; ++n) {
      const auto a = randoms(n, 3), b = randoms(n, 4), g = randoms(n, 5);
      const double ma = n ? k::scalar::sum(a) / n : 0.0, mb = n ? k::scalar::sum(b) / n : 0.0;
      double scale = 0.0;
      for (double x : a) scale += std::abs(x);
      check_close(k::sum(a), k::scalar::sum(a), scale);
      check_close(k::centered_dot(a, ma, b, mb), k::scalar::centered_dot(a, ma, b, mb),
                  k::scalar::centered_dot(a, ma, a, ma) + k::scalar::centered_dot(b, mb, b, mb));
      check_close(k::squared_distance(a, b), k::scalar::squared_distance(a, b),
                  k::scalar::squared_distance(a, b));

      std::vector<double> x1 = a, x2 = a;
      k::gain_update(x1, g, b);
      k::scalar::gain_update(x2, g, b);
      CHECK(x1 == x2);  // elementwise update must be bitwise identical
    }
  }
  k::reset_backend();
}

TEST_CASE("dispatch control") {
  CHECK(k::backend_available(k::Backend::Scalar));
  k::force_backend(k::Backend::Scalar);
  CHECK(k::active_backend() == k::Backend::Scalar);
  k::reset_backend();
  if (k::backend_available(k::Backend::Avx2)) CHECK(k::active_backend() == k::Backend::Avx2);
  for (k::Backend be : kAll)
    if (!k::backend_available(be)) CHECK_THROWS_AS(k::force_backend(be), Error);
  CHECK(k::backend_name(k::Backend::Scalar) == "scalar");
}

#include <atomic>
#include <string>

#include "enkfsq/error.hpp"
#include "enkfsq/kernels.hpp"

namespace enkfsq::kernels {

namespace {

struct Table {
  double (*sum)(std::span<const double>);
  double (*centered_dot)(std::span<const double>, double, std::span<const double>, double);
  double (*squared_distance)(std::span<const double>, std::span<const double>);
  void (*gain_update)(std::span<double>, std::span<const double>, std::span<const double>);
};

constexpr Table kScalar{scalar::sum, scalar::centered_dot, scalar::squared_distance,
                        scalar::gain_update};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2{avx2::sum, avx2::centered_dot, avx2::squared_distance,
                      avx2::gain_update};
#endif
#if defined(__aarch64__)
constexpr Table kNeon{neon::sum, neon::centered_dot, neon::squared_distance,
                      neon::gain_update};
#endif

Backend best_available() {
  if (backend_available(Backend::Avx2)) return Backend::Avx2;
  if (backend_available(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

const Table& table_for(Backend b) {
  switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::Avx2:
      return kAvx2;
#endif
#if defined(__aarch64__)
    case Backend::Neon:
      return kNeon;
#endif
    default:
      return kScalar;
  }
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{best_available()};
  return b;
}

const Table& active() { return table_for(current().load(std::memory_order_relaxed)); }

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() { return current().load(); }

void force_backend(Backend b) {
  if (!backend_available(b))
    throw Error("kernel backend '" + std::string(backend_name(b)) + "' is not available");
  current().store(b);
}

void reset_backend() { current().store(best_available()); }

double sum(std::span<const double> a) { return active().sum(a); }

double centered_dot(std::span<const double> a, double mean_a, std::span<const double> b,
                    double mean_b) {
  return active().centered_dot(a, mean_a, b, mean_b);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a, b);
}

void gain_update(std::span<double> x, std::span<const double> gain,
                 std::span<const double> innovation) {
  active().gain_update(x, gain, innovation);
}

}  // namespace enkfsq::kernels

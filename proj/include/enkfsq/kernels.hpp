#pragma once

// Data-parallel inner loops of the analysis and diagnostics: reductions over
// ensemble members and the per-member gain update. A scalar reference
// implementation is always available; vector variants are selected at
// runtime from what the CPU supports.
//
// Elementwise kernels (gain_update) are bitwise identical across backends.
// Reductions (sum, centered_dot, squared_distance) reassociate and agree with
// the scalar reference to rounding only.

#include <span>
#include <string_view>

namespace enkfsq::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);
bool backend_available(Backend b);

/// Backend used by the dispatching entry points below.
Backend active_backend();
/// Pins the dispatching entry points to `b`. Throws enkfsq::Error if `b` is
/// not available on this machine.
void force_backend(Backend b);
/// Restores automatic selection (best available backend).
void reset_backend();

/// sum_i a[i]
double sum(std::span<const double> a);
/// sum_i (a[i] - mean_a) * (b[i] - mean_b); a and b must have equal length.
double centered_dot(std::span<const double> a, double mean_a, std::span<const double> b,
                    double mean_b);
/// sum_i (a[i] - b[i])^2
double squared_distance(std::span<const double> a, std::span<const double> b);
/// x[i] += gain[i] * innovation[i]
void gain_update(std::span<double> x, std::span<const double> gain,
                 std::span<const double> innovation);

namespace scalar {
double sum(std::span<const double> a);
double centered_dot(std::span<const double> a, double mean_a, std::span<const double> b,
                    double mean_b);
double squared_distance(std::span<const double> a, std::span<const double> b);
void gain_update(std::span<double> x, std::span<const double> gain,
                 std::span<const double> innovation);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double sum(std::span<const double> a);
double centered_dot(std::span<const double> a, double mean_a, std::span<const double> b,
                    double mean_b);
double squared_distance(std::span<const double> a, std::span<const double> b);
void gain_update(std::span<double> x, std::span<const double> gain,
                 std::span<const double> innovation);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double sum(std::span<const double> a);
double centered_dot(std::span<const double> a, double mean_a, std::span<const double> b,
                    double mean_b);
double squared_distance(std::span<const double> a, std::span<const double> b);
void gain_update(std::span<double> x, std::span<const double> gain,
                 std::span<const double> innovation);
}  // namespace neon
#endif

}  // namespace enkfsq::kernels

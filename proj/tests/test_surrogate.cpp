#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "enkfsq/diagnostics.hpp"
#include "enkfsq/error.hpp"
#include "enkfsq/surrogate_model.hpp"
#include "oracles.hpp"

using namespace enkfsq;

namespace {

ForcingParams quiet() {
  ForcingParams p;
  p.growth_amplitude = 0.0;
  p.advection_speed = 0.0;
  p.perturbation_std = 0.0;
  return p;
}

StateField ramp(std::size_t n) {
  StateField s(n);
  for (std::size_t c = 0; c < n; ++c) {
    s.sit[c] = c % 5 == 0 ? 0.0 : 0.2 + 0.05 * static_cast<double>(c);
    s.sic[c] = s.sit[c] > 0.0 ? 0.9 : 0.0;
  }
  return s;
}

}  // namespace

TEST_CASE("growth rate follows the seasonal cosine") {
  ForcingParams p;
  p.growth_amplitude = 0.03;
  CHECK(growth_rate(0, p) == doctest::Approx(0.03));
  CHECK(growth_rate(365 / 2, p) < 0.0);
  CHECK(growth_rate(-30, p) == doctest::Approx(0.03 * std::cos(2 * std::numbers::pi * -30 / 365.0)));
}

TEST_CASE("open water stays open while melting") {
  const ForcingParams p;
  const StateField s(10);
  const StateField out = step_truth(s, 180, p);
  CHECK(out == s);
}

TEST_CASE("no growth and no drift is a fixpoint") {
  const StateField s = ramp(20);
  StateField x = s;
  for (int d = 0; d < 30; ++d) x = step_truth(x, d, quiet());
  CHECK(x.sit == s.sit);
}

TEST_CASE("winter half-cycle matches the scalar growth ODE") {
  ForcingParams p;
  p.advection_speed = 0.0;
  StateField s(4);
  for (std::size_t c = 0; c < 4; ++c) {
    s.sit[c] = 0.10;
    s.sic[c] = 1.0;
  }
  // Forward Euler on dh/dt = g(t)(1 - h/4) with the same daily step is the
  // oracle; the model must agree exactly in the absence of drift.
  double h = 0.10, h_max_seen = 0.10, prev = 0.10;
  bool monotone = true;
  StateField x = s;
  for (int day = -91; day < 91; ++day) {
    h += p.growth_amplitude * std::cos(2 * std::numbers::pi * day / 365.0) * (1.0 - h / 4.0);
    x = step_truth(x, day, p);
    CHECK(x.sit[0] == doctest::Approx(h).epsilon(1e-12));
    monotone &= x.sit[0] >= prev;
    prev = x.sit[0];
    h_max_seen = std::max(h_max_seen, x.sit[0]);
  }
  CHECK(monotone);
  CHECK(h_max_seen > 0.10);
  CHECK(h_max_seen < 4.0);
  // Continuous-time solution for comparison: 1 - h/4 = (1 - h0/4) exp(-G/4).
  const double G = p.growth_amplitude * 365.0 / std::numbers::pi;  // integral over the half-cycle
  const double exact = 4.0 - (4.0 - 0.10) * std::exp(-G / 4.0);
  CHECK(h == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("advection by a whole cell shifts the field") {
  ForcingParams p = quiet();
  p.advection_speed = 1.0;
  const StateField s = ramp(12);
  const StateField out = step_truth(s, 0, p);
  for (std::size_t c = 0; c < 12; ++c) {
    const double src = s.sit[(c + 11) % 12];
    if (src >= kMinIceThickness || src == 0.0) CHECK(out.sit[c] == doctest::Approx(src));
  }
}

TEST_CASE("step invariants: positivity and the minimum thickness") {
  ForcingParams p;
  p.growth_amplitude = 0.08;
  const GridSpec g{50, 12.5, true};
  RandomStream rng = RandomStream::derive(5, StreamTag::Test, {1});
  StateField s(50);
  for (std::size_t c = 0; c < 50; ++c) {
    s.sit[c] = std::max(0.0, 0.5 + 0.6 * rng.normal());
    if (s.sit[c] < kMinIceThickness) s.sit[c] = 0.0;
    s.sic[c] = s.sit[c] > 0.0 ? rng.uniform() : 0.0;
  }
  PerturbationState pert = initial_perturbation(p, g, rng);
  StateField t = s;
  for (int day = 0; day < 400; ++day) {
    auto [next, np] = step_member(s, day, p, pert, g, rng);
    s = std::move(next);
    pert = std::move(np);
    t = step_truth(t, day, p);
    for (const StateField* x : {&s, &t})
      for (std::size_t c = 0; c < 50; ++c) {
        CHECK(x->sit[c] >= 0.0);
        CHECK(!(x->sit[c] > 0.0 && x->sit[c] < kMinIceThickness));
        CHECK(x->sic[c] >= 0.0);
        CHECK(x->sic[c] <= 1.0);
      }
  }
}

TEST_CASE("zero perturbation std reproduces the truth step") {
  ForcingParams p;
  p.perturbation_std = 0.0;
  const GridSpec g{30, 12.5, true};
  RandomStream rng = RandomStream::derive(6, StreamTag::Test, {1});
  StateField s = ramp(30);
  PerturbationState pert = initial_perturbation(p, g, rng);
  for (int day = -50; day < 20; ++day) {
    const StateField t = step_truth(s, day, p);
    auto [m, np] = step_member(s, day, p, pert, g, rng);
    CHECK(m == t);
    s = t;
    pert = np;
  }
}

TEST_CASE("member perturbations are a stationary AR(1) process") {
  ForcingParams p;
  const GridSpec g{100, 12.5, true};
  CHECK(smoothing_window(p, g) == 20);
  RandomStream rng = RandomStream::derive(7, StreamTag::Test, {1});
  PerturbationState pert = initial_perturbation(p, g, rng);
  const std::size_t steps = 10'000, cell = 17;
  std::vector<double> x;
  x.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    pert = evolve_perturbation(pert, p, g, rng);
    x.push_back(pert.field[cell]);
  }
  CHECK(std::sqrt(oracle::variance(x)) == doctest::Approx(p.perturbation_std).epsilon(0.05));
  const double m = oracle::mean(x), v = oracle::variance(x);
  double lag2 = 0.0;
  for (std::size_t t = 2; t < steps; ++t) lag2 += (x[t] - m) * (x[t - 2] - m);
  lag2 /= static_cast<double>(steps - 2) * v;
  CHECK(std::abs(lag2 - std::exp(-1.0)) < 0.05);
}

TEST_CASE("spatial smoothing correlates neighbours over the window") {
  ForcingParams p;
  const GridSpec g{100, 12.5, true};
  const std::size_t w = smoothing_window(p, g);
  double c1 = 0.0, cw = 0.0, v = 0.0;
  for (std::uint64_t k = 0; k < 2000; ++k) {
    RandomStream rng = RandomStream::derive(k, StreamTag::Test, {2});
    const auto e = smoothed_noise(p, g, rng);
    for (std::size_t c = 0; c < 100; ++c) {
      v += e[c] * e[c];
      c1 += e[c] * e[(c + 1) % 100];
      cw += e[c] * e[(c + w) % 100];
    }
  }
  // Moving average of w white values: lag-l correlation (w - l) / w.
  CHECK(c1 / v == doctest::Approx(static_cast<double>(w - 1) / w).epsilon(0.02));
  CHECK(std::abs(cw / v) < 0.03);
  CHECK(std::sqrt(v / 200000.0) == doctest::Approx(p.perturbation_std).epsilon(0.02));
}

TEST_CASE("spread grows from identical members") {
  const ForcingParams p;
  const GridSpec g{100, 12.5, true};
  StateField s(100);
  for (std::size_t c = 0; c < 100; ++c) {
    s.sit[c] = 1.0 + 0.5 * std::sin(2 * std::numbers::pi * c / 100.0);
    s.sic[c] = 1.0;
  }
  std::vector<StateField> m(20, s);
  std::vector<PerturbationState> pert;
  std::vector<RandomStream> rng;
  for (std::size_t i = 0; i < 20; ++i) {
    rng.push_back(RandomStream::derive(1, StreamTag::MemberForcing, {i}));
    pert.push_back(initial_perturbation(p, g, rng.back()));
  }
  double prev = 0.0;
  for (int day = -60; day < -53; ++day) {
    for (std::size_t i = 0; i < 20; ++i) {
      auto [x, np] = step_member(m[i], day, p, pert[i], g, rng[i]);
      m[i] = x;
      pert[i] = np;
    }
    const double a = aes(Ensemble(g, m));
    CHECK(a > prev);
    prev = a;
  }
}

TEST_CASE("forcing validation") {
  ForcingParams p;
  p.season_length = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = ForcingParams{};
  p.time_decorrelation = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

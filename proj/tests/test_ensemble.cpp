#include <cmath>
#include <vector>

#include "doctest.h"
#include "enkfsq/ensemble.hpp"
#include "enkfsq/error.hpp"
#include "enkfsq/random.hpp"
#include "oracles.hpp"

using namespace enkfsq;

namespace {

Ensemble random_ensemble(std::size_t n_members, std::size_t n_cells, std::uint64_t seed) {
  RandomStream rng = RandomStream::derive(seed, StreamTag::Test, {0});
  std::vector<StateField> m;
  for (std::size_t i = 0; i < n_members; ++i) {
    StateField s(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) {
      s.sit[c] = 1.5 + 0.7 * rng.normal();
      s.sic[c] = rng.uniform();
    }
    m.push_back(s);
  }
  return Ensemble(GridSpec{n_cells, 12.5, true}, m);
}

}  // namespace

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS(Ensemble(GridSpec{4}, {StateField(4)}), Error);
  CHECK_THROWS_AS(Ensemble(GridSpec{4}, {StateField(4), StateField(3)}), Error);
  CHECK_THROWS_AS((GridSpec{1}.validate()), Error);
  CHECK_THROWS_AS((GridSpec{10, 0.0}.validate()), Error);
}

TEST_CASE("ensemble mean") {
  StateField a(3);
  a.sit = {0.5, 1.0, 2.0};
  a.sic = {1.0, 0.2, 0.3};
  CHECK(ensemble_mean(Ensemble(GridSpec{3}, {a, a})) == a);

  StateField b(3);
  b.sit = {1.5, 1.0, 2.0};
  CHECK(ensemble_mean(Ensemble(GridSpec{3}, {a, b})).sit[0] == 1.0);

  const Ensemble e = random_ensemble(99, 20, 5);
  const StateField m = ensemble_mean(e);
  for (std::size_t c = 0; c < 20; ++c) {
    double s = 0.0, t = 0.0;
    for (std::size_t i = 0; i < 99; ++i) {
      s += e.member(i).sit[c];
      t += e.member(i).sic[c];
    }
    CHECK(std::abs(m.sit[c] - s / 99) < 1e-12);
    CHECK(std::abs(m.sic[c] - t / 99) < 1e-12);
  }
}

TEST_CASE("anomalies sum to zero") {
  const Ensemble e = random_ensemble(37, 15, 9);
  const auto an = ensemble_anomalies(e);
  for (std::size_t c = 0; c < 15; ++c) {
    double s = 0.0, t = 0.0;
    for (const auto& a : an) {
      s += a.sit[c];
      t += a.sic[c];
    }
    CHECK(std::abs(s) < 1e-12);
    CHECK(std::abs(t) < 1e-12);
  }
}

TEST_CASE("local covariances: hand cases") {
  StateField a(2), b(2);
  a.sit = {0.0, 1.0};
  b.sit = {2.0, 1.0};
  const Ensemble e(GridSpec{2}, {a, b});
  CHECK(local_covariances(e, 0, 0).var_obs == doctest::Approx(2.0));
  const LocalCovariances flat = local_covariances(e, 0, 1);
  CHECK(flat.var_obs == 0.0);
  CHECK(flat.cov_sit_obs == 0.0);
  CHECK(flat.cov_sic_obs == 0.0);
  std::vector<double> one{1.0};
  CHECK_THROWS_AS(local_covariances(one, one, one), Error);
}

TEST_CASE("local covariances match a dense covariance matrix") {
  const std::size_t n_cells = 8;
  const Ensemble e = random_ensemble(50, n_cells, 11);
  // State vector layout: sit[0..n), sic[0..n).
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < e.size(); ++i) {
    std::vector<double> r(e.member(i).sit);
    r.insert(r.end(), e.member(i).sic.begin(), e.member(i).sic.end());
    rows.push_back(r);
  }
  const auto p = oracle::dense_covariance(rows);
  for (std::size_t c = 0; c < n_cells; ++c)
    for (std::size_t o = 0; o < n_cells; ++o) {
      const LocalCovariances lc = local_covariances(e, c, o);
      CHECK(std::abs(lc.cov_sit_obs - p[c][o]) < 1e-12);
      CHECK(std::abs(lc.cov_sic_obs - p[n_cells + c][o]) < 1e-12);
      CHECK(std::abs(lc.var_obs - p[o][o]) < 1e-12);
    }
}

TEST_CASE("local covariance symmetry and scaling") {
  const Ensemble e = random_ensemble(25, 6, 13);
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b)
      CHECK(local_covariances(e, a, b).cov_sit_obs ==
            doctest::Approx(local_covariances(e, b, a).cov_sit_obs).epsilon(1e-13));

  std::vector<StateField> scaled(e.members().begin(), e.members().end());
  const double k = 3.7;
  for (auto& m : scaled)
    for (double& v : m.sit) v *= k;
  const Ensemble es(e.grid(), scaled);
  const LocalCovariances l0 = local_covariances(e, 1, 4), l1 = local_covariances(es, 1, 4);
  CHECK(l1.var_obs == doctest::Approx(k * k * l0.var_obs).epsilon(1e-12));
  CHECK(l1.cov_sit_obs == doctest::Approx(k * k * l0.cov_sit_obs).epsilon(1e-12));
}

TEST_CASE("hard observation perturbation") {
  RandomStream r0 = RandomStream::derive(1, StreamTag::Test, {4});
  CHECK(perturb_observation_hard(0.7, 0.0, r0) == 0.7);

  RandomStream a = RandomStream::derive(1, StreamTag::Test, {5});
  RandomStream b = RandomStream::derive(1, StreamTag::Test, {5});
  CHECK(perturb_observation_hard(1.0, 0.11, a) == perturb_observation_hard(1.0, 0.11, b));

  RandomStream rng = RandomStream::derive(1, StreamTag::Test, {6});
  const std::size_t n = 1'000'000;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += perturb_observation_hard(1.0, 0.11, rng);
  CHECK(std::abs(s / n - 1.0) < 4 * 0.11 / 1000.0);
}

TEST_CASE("head keeps the first members") {
  const Ensemble e = random_ensemble(10, 4, 2);
  const Ensemble h = e.head(3);
  CHECK(h.size() == 3);
  CHECK(h.member(2) == e.member(2));
  CHECK_THROWS_AS(e.head(1), Error);
  CHECK_THROWS_AS(e.head(11), Error);
}

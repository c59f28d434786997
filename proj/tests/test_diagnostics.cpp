#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "enkfsq/diagnostics.hpp"
#include "enkfsq/error.hpp"
#include "enkfsq/filters.hpp"
#include "enkfsq/two_piece.hpp"
#include "oracles.hpp"

using namespace enkfsq;

namespace {

Ensemble from_columns(const std::vector<std::vector<double>>& members) {
  std::vector<StateField> m;
  for (const auto& v : members) {
    StateField s(v.size());
    s.sit = v;
    std::fill(s.sic.begin(), s.sic.end(), 1.0);
    m.push_back(s);
  }
  return Ensemble(GridSpec{members.front().size(), 12.5, true}, m);
}

}  // namespace

TEST_CASE("rmse") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(rmse(a, a) == 0.0);
  const std::vector<double> b{1.1, 2.1, 3.1};
  CHECK(rmse(b, a) == doctest::Approx(0.1));
  CHECK(rmse(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 2.0}) ==
        doctest::Approx(std::sqrt(2.5)));
  std::vector<double> p = b, q = a;
  std::rotate(p.begin(), p.begin() + 1, p.end());
  std::rotate(q.begin(), q.begin() + 1, q.end());
  CHECK(rmse(p, q) == doctest::Approx(rmse(b, a)));
}

TEST_CASE("aes") {
  CHECK(aes(from_columns({{1.0, 2.0}, {1.0, 2.0}})) == 0.0);
  CHECK(aes(from_columns({{0.0, 1.0, 3.0}, {2.0, 3.0, 5.0}})) == doctest::Approx(std::sqrt(2.0)));

  RandomStream rng = RandomStream::derive(1, StreamTag::Test, {0});
  std::vector<std::vector<double>> cols(30, std::vector<double>(12));
  for (auto& m : cols)
    for (auto& v : m) v = 1.0 + rng.normal();
  double s = 0.0;
  for (std::size_t c = 0; c < 12; ++c) {
    std::vector<double> col;
    for (const auto& m : cols) col.push_back(m[c]);
    s += oracle::variance(col);
  }
  CHECK(std::abs(aes(from_columns(cols)) - std::sqrt(s / 12.0)) < 1e-12);
  std::reverse(cols.begin(), cols.end());
  CHECK(std::abs(aes(from_columns(cols)) - std::sqrt(s / 12.0)) < 1e-12);
}

TEST_CASE("standard bins") {
  const BinSpec b = BinSpec::standard();
  CHECK(b.n_bins() == 14);
  CHECK(b.bin_of(0.0) == 0u);
  CHECK(b.bin_of(0.1) == 0u);
  CHECK(b.bin_of(0.8) == 4u);
  CHECK(b.bin_of(1.0) == 4u);
  CHECK(b.bin_of(1.01) == 5u);
  CHECK(b.bin_of(7.0) == 13u);
  CHECK_FALSE(b.bin_of(-0.1).has_value());
  CHECK(b.label(13) == "3-inf");
}

TEST_CASE("conditional bias") {
  const BinSpec bins = BinSpec::standard();
  const std::vector<double> truth{1.0, 2.0};
  const auto zero = conditional_bias(truth, truth, std::vector<RawObservation>{{0, 0.5}, {1, 2.0}}, bins);
  for (const auto& v : zero.bins.values)
    if (v) CHECK(*v == 0.0);

  const auto one = conditional_bias(std::vector<double>{1.05}, std::vector<double>{1.0},
                                    std::vector<RawObservation>{{0, 0.8}}, bins);
  CHECK(one.bins.values[4].value() == doctest::Approx(0.05));
  CHECK_FALSE(one.bins.values[5].has_value());

  // Ten cells, hand-partitioned.
  RandomStream rng = RandomStream::derive(2, StreamTag::Test, {0});
  std::vector<double> post(10), t(10);
  std::vector<RawObservation> obs;
  for (std::size_t c = 0; c < 10; ++c) {
    t[c] = 0.3 * static_cast<double>(c);
    post[c] = t[c] + 0.1 * rng.normal();
    if (c != 3) obs.push_back({c, std::max(0.0, t[c] + 0.2 * rng.normal())});
  }
  const auto cb = conditional_bias(post, t, obs, bins);
  double total = 0.0;
  for (std::size_t k = 0; k < bins.n_bins(); ++k) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& o : obs)
      if (bins.bin_of(o.value) == k) {
        s += post[o.cell] - t[o.cell];
        ++n;
      }
    CHECK(cb.bins.counts[k] == n);
    if (n == 0) CHECK_FALSE(cb.bins.values[k].has_value());
    else CHECK(*cb.bins.values[k] == doctest::Approx(s / n).epsilon(1e-14));
    total += s;
  }
  CHECK(std::abs(cb.weighted_total - total / static_cast<double>(obs.size())) < 1e-12);
}

TEST_CASE("skewness") {
  CHECK(sample_skewness(std::vector<double>{-1.0, 0.0, 1.0}).value() == doctest::Approx(0.0));
  // Deviations {-1, -1, 2}: m2 = 2, m3 = 2 with 1/n moments.
  CHECK(sample_skewness(std::vector<double>{0.0, 0.0, 3.0}).value() ==
        doctest::Approx(2.0 / std::pow(2.0, 1.5)));
  CHECK_FALSE(sample_skewness(std::vector<double>{2.0, 2.0, 2.0}).has_value());

  std::vector<double> x{0.3, 1.2, 0.7, 2.5, 0.1};
  const double g = sample_skewness(x).value();
  for (double& v : x) v = 3.0 * v - 4.0;
  CHECK(sample_skewness(x).value() == doctest::Approx(g).epsilon(1e-10));
}

TEST_CASE("skewness of a two-piece sample matches the quadrature value") {
  const TwoPieceGaussian d(1.0, 0.11, 0.75);
  RandomStream rng = RandomStream::derive(3, StreamTag::Test, {0});
  std::vector<double> x(1'000'000);
  for (auto& v : x) v = d.sample(rng);
  const double m1 = oracle::two_piece_moment(1, 1.0, 0.11, 0.75);
  const double m2 = oracle::two_piece_moment(2, 1.0, 0.11, 0.75);
  const double m3 = oracle::two_piece_moment(3, 1.0, 0.11, 0.75);
  const double var = m2 - m1 * m1;
  const double g1 = (m3 - 3 * m1 * m2 + 2 * m1 * m1 * m1) / std::pow(var, 1.5);
  CHECK(g1 > 0.0);
  CHECK(sample_skewness(x).value() == doctest::Approx(g1).epsilon(0.05));
}

TEST_CASE("conditional skewness bins by truth") {
  const Ensemble e = from_columns({{0.0, 1.5}, {0.0, 1.6}, {3.0, 1.7}});
  const auto s = conditional_skewness(e, std::vector<double>{0.8, 1.6}, BinSpec::standard());
  CHECK(s.values[4].value() == doctest::Approx(2.0 / std::pow(2.0, 1.5)));
  CHECK(s.values[7].value() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.counts[4] == 1);
  CHECK_THROWS_AS(conditional_skewness(from_columns({{1.0}, {2.0}}), std::vector<double>{1.0},
                                       BinSpec::standard()),
                  Error);
}

TEST_CASE("volume") {
  CHECK(ice_volume(StateField(5), 156.25) == 0.0);
  StateField s(1);
  s.sit = {2.0};
  s.sic = {0.5};
  CHECK(ice_volume(s, 1.0) == doctest::Approx(1.0));
  s.sit = {4.0};
  CHECK(ice_volume(s, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("percent soft") {
  std::vector<RangeLimitedObservation> o{make_hard(0, 0.5, 0.1, 1.0), make_soft(1, 1.0),
                                         make_soft(2, 1.0), make_soft(3, 1.0)};
  CHECK(percent_soft(o) == doctest::Approx(75.0));
  CHECK(percent_soft(std::vector<RangeLimitedObservation>(o.begin() + 1, o.end())) == 100.0);
  CHECK(percent_soft(std::vector<RangeLimitedObservation>(o.begin(), o.begin() + 1)) == 0.0);
  CHECK_THROWS_AS(percent_soft(std::vector<RangeLimitedObservation>{}), Error);
}

TEST_CASE("binned accumulator") {
  BinnedAccumulator acc(3);
  acc.add(1, 1.0);
  acc.add(1, -3.0);
  CHECK(acc.mean(1).value() == doctest::Approx(-1.0));
  CHECK(acc.rms(1).value() == doctest::Approx(std::sqrt(5.0)));
  CHECK_FALSE(acc.mean(0).has_value());
  CHECK(acc.total_count() == 2);
}

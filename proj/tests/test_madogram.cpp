#include <cmath>
#include <cstdint>
#include <vector>

#include "core/error.hpp"
#include "core/madogram.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"
#include "doctest.h"

using namespace extnet;

namespace {

MaximaMatrix two_columns(std::vector<double> a, std::vector<double> b,
                         std::vector<unsigned char> valid = {}) {
  const std::size_t m = a.size();
  std::vector<double> values(2 * m);
  for (std::size_t t = 0; t < m; ++t) {
    values[2 * t] = a[t];
    values[2 * t + 1] = b[t];
  }
  if (valid.empty()) valid.assign(2 * m, 1);
  std::vector<long long> labels(m);
  for (std::size_t t = 0; t < m; ++t) labels[t] = static_cast<long long>(t);
  return MaximaMatrix(m, 2, std::move(values), std::move(valid), std::move(labels), {"a", "b"});
}

}  // namespace

TEST_CASE("madogram-to-chi mapping: endpoints and round trips") {
  // nu = 0 (comonotone) -> theta = 1 -> chi = 1, exactly
  CHECK(nu_to_chi(0.0) == 1.0);
  // nu = 1/6 (independence) -> theta = 2 -> chi = 0
  CHECK(std::abs(nu_to_chi(1.0 / 6.0)) <= 1e-12);
  // chi -> theta -> nu -> chi round trip across the whole legal range
  for (double nu = 0.0; nu < 0.5; nu += 0.005) {
    const double chi = nu_to_chi(nu);
    const double theta = 2.0 - chi;
    const double nu_back = (theta - 1.0) / (2.0 * (theta + 1.0));
    CHECK(std::abs(nu_back - nu) <= 1e-12);
    CHECK(std::abs(nu_to_chi(nu_back) - chi) <= 1e-12);
  }
  CHECK_THROWS_AS((void)nu_to_chi(0.5), Error);
  CHECK_THROWS_AS((void)nu_to_chi(-0.01), Error);
}

TEST_CASE("a station against itself gives chi exactly one") {
  const std::vector<double> x{3.1, 0.2, 7.7, 2.2, 5.0, 9.3, 1.1};
  const MaximaMatrix m = two_columns(x, x);
  const RankMatrix r = edf_ranks(m, RankConvention::over_m_plus_1);
  const PairChi pc = chi_pair(r, 0, 1);
  REQUIRE(pc.estimable);
  CHECK(pc.chi == 1.0);  // exact: the madogram sum is identically zero
  CHECK(pc.nu == 0.0);
}

TEST_CASE("perfectly reversed ranks at m=4 pin both conventions") {
  const MaximaMatrix m = two_columns({1, 2, 3, 4}, {4, 3, 2, 1});
  // over m: u = .25 .5 .75 1 vs reversed; nu = 1/4, theta = 3, chi = -1 exactly
  const RankMatrix rm = edf_ranks(m, RankConvention::over_m);
  CHECK(chi_pair(rm, 0, 1, {/*rerank_common=*/false}).chi == -1.0);
  // over m+1: nu = 1/5, theta = 7/3, chi = -1/3
  const RankMatrix rm1 = edf_ranks(m, RankConvention::over_m_plus_1);
  CHECK(chi_pair(rm1, 0, 1, {false}).chi == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("chi estimates are invariant under monotone transforms of the data") {
  CounterRng rng(5, 0);
  std::vector<double> a(40), b(40);
  for (std::size_t t = 0; t < 40; ++t) {
    a[t] = rng.normal();
    b[t] = 0.5 * a[t] + rng.normal();
  }
  std::vector<double> ea(40), eb(40);
  for (std::size_t t = 0; t < 40; ++t) {
    ea[t] = std::exp(a[t]);        // strictly increasing transform
    eb[t] = std::exp(0.3 * b[t]);  // different transform, same order
  }
  const RankMatrix r1 = edf_ranks(two_columns(a, b), RankConvention::over_m_plus_1);
  const RankMatrix r2 = edf_ranks(two_columns(ea, eb), RankConvention::over_m_plus_1);
  CHECK(chi_pair(r1, 0, 1).chi == chi_pair(r2, 0, 1).chi);  // bitwise equal
}

TEST_CASE("missing blocks shrink the common sample; short overlaps are unestimable") {
  // blocks where both are valid: t = 0 only -> unestimable
  const MaximaMatrix m = two_columns({1, 2, 3, 4}, {5, 6, 7, 8},
                                     {1, 1, 1, 0, 1, 0, 0, 1});
  const RankMatrix r = edf_ranks(m, RankConvention::over_m_plus_1);
  const PairChi pc = chi_pair(r, 0, 1);
  CHECK_FALSE(pc.estimable);
  CHECK(pc.n_common == 1);

  const ChiMatrix cm = chi_matrix(r);
  CHECK(cm.is_missing(0, 1));
  CHECK(std::isnan(cm.chi(0, 1)));
  CHECK(cm.pairs_used(0, 1) == 1);
  CHECK(cm.chi(0, 0) == 1.0);  // diagonal fixed
}

TEST_CASE("re-ranking on the common blocks differs from sliced full-column ranks") {
  // Station a misses block 3, station b misses block 0: intersection {1,2,4,5}.
  const MaximaMatrix m = two_columns({9, 1, 5, 0, 7, 3}, {0, 2, 9, 4, 1, 6},
                                     {1, 1, 1, 1, 1, 1, 0, 1, 1, 0, 1, 1});
  const RankMatrix r = edf_ranks(m, RankConvention::over_m_plus_1);
  const double with = chi_pair(r, 0, 1, {true}).chi;
  const double without = chi_pair(r, 0, 1, {false}).chi;
  CHECK(with != without);

  // With complete data the two options coincide exactly.
  const MaximaMatrix full = two_columns({9, 1, 5, 0, 7, 3}, {0, 2, 9, 4, 1, 6});
  const RankMatrix rf = edf_ranks(full, RankConvention::over_m_plus_1);
  CHECK(chi_pair(rf, 0, 1, {true}).chi == chi_pair(rf, 0, 1, {false}).chi);
}

TEST_CASE("chi matrix is symmetric and identical for any worker count") {
  CounterRng rng(17, 1);
  const std::size_t m = 30, d = 7;
  std::vector<double> values(m * d);
  std::vector<unsigned char> valid(m * d, 1);
  for (auto& v : values) v = rng.uniform();
  valid[3] = 0;
  valid[d + 3] = 0;
  valid[2 * d + 5] = 0;
  std::vector<long long> labels(m);
  for (std::size_t t = 0; t < m; ++t) labels[t] = static_cast<long long>(t);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < d; ++i) ids.push_back("s" + std::to_string(i));
  const MaximaMatrix mm(m, d, values, valid, labels, ids);
  const RankMatrix r = edf_ranks(mm, RankConvention::over_m_plus_1);
  const ChiMatrix c1 = chi_matrix(r, {}, 1);
  const ChiMatrix c4 = chi_matrix(r, {}, 4);
  CHECK(c1.values() == c4.values());
  CHECK(c1.pair_counts() == c4.pair_counts());
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (std::isnan(c1.chi(i, j))) {
        CHECK(std::isnan(c1.chi(j, i)));
      } else {
        CHECK(c1.chi(i, j) == c1.chi(j, i));
      }
    }
}

TEST_CASE("independence Monte Carlo: chi-hat concentrates near zero") {
  CounterRng rng(2024, 3);
  const std::size_t m = 20000;
  std::vector<double> a(m), b(m);
  for (std::size_t t = 0; t < m; ++t) {
    a[t] = rng.uniform();
    b[t] = rng.uniform();
  }
  const RankMatrix r = edf_ranks(two_columns(a, b), RankConvention::over_m_plus_1);
  CHECK(std::abs(chi_pair(r, 0, 1).chi) < 0.03);
}

TEST_CASE("conditional exceedance curve matches direct enumeration") {
  // over-m-plus-1 ranks of a=(10,20,30,40): .2 .4 .6 .8; b=(40,10,30,20): .8 .2 .6 .4
  const MaximaMatrix m = two_columns({10, 20, 30, 40}, {40, 10, 30, 20});
  const RankMatrix r = edf_ranks(m, RankConvention::over_m_plus_1);
  const ChiUCurve curve = chi_u_curve(r, 0, 1, {0.35, 0.5, 0.9});
  REQUIRE(curve.u.size() == 3);
  CHECK(curve.defined[0] == 1);
  CHECK(curve.chi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(curve.defined[1] == 1);
  CHECK(curve.chi[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(curve.defined[2] == 0);  // nothing exceeds u = 0.9

  // random data: enumeration oracle over a grid
  CounterRng rng(8, 8);
  std::vector<double> x(50), y(50);
  for (std::size_t t = 0; t < 50; ++t) {
    x[t] = rng.normal();
    y[t] = 0.7 * x[t] + rng.normal();
  }
  const RankMatrix rr = edf_ranks(two_columns(x, y), RankConvention::over_m_plus_1);
  const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
  const ChiUCurve got = chi_u_curve(rr, 0, 1, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::size_t num = 0, den = 0;
    for (std::size_t t = 0; t < 50; ++t) {
      if (rr.value(t, 0) > grid[k]) {
        ++den;
        if (rr.value(t, 1) > grid[k]) ++num;
      }
    }
    if (den == 0) {
      CHECK(got.defined[k] == 0);
    } else {
      REQUIRE(got.defined[k] == 1);
      CHECK(got.chi[k] ==
            doctest::Approx(static_cast<double>(num) / static_cast<double>(den))
                .epsilon(1e-15));
    }
  }
}

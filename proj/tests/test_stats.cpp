#include <cmath>
#include <vector>

#include "core/stats.hpp"
#include "doctest.h"

using namespace extnet;

TEST_CASE("normal CDF hits reference values") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  // scipy.stats.norm.cdf reference points
  CHECK(norm_cdf(-3.0) == doctest::Approx(0.0013498980316300933).epsilon(1e-12));
  CHECK(norm_cdf(-0.5) == doctest::Approx(0.3085375387259869).epsilon(1e-12));
  CHECK(norm_cdf(0.7) == doctest::Approx(0.758036347776927).epsilon(1e-12));
  CHECK(norm_cdf(2.2) == doctest::Approx(0.9860965524865014).epsilon(1e-12));
}

TEST_CASE("normal quantile inverts the CDF to high accuracy") {
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1).scale(1e-15));
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(norm_quantile(0.85) == doctest::Approx(1.0364333894937898).epsilon(1e-13));
  // Dyadic probabilities so that 1 - p is exactly representable; otherwise
  // the rounding of the complement alone perturbs the deep-tail quantile by
  // more than the tolerance below.
  for (double p : {0x1.0p-27, 0x1.0p-13, 0.03125, 0.2265625, 0.5, 0.765625, 0.9921875,
                   1.0 - 0x1.0p-23}) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-11));
    // antisymmetry
    CHECK(norm_quantile(p) == doctest::Approx(-norm_quantile(1.0 - p)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("regularized incomplete beta hits scipy reference values") {
  CHECK(reg_inc_beta(2, 3, 0.4) == doctest::Approx(0.5247999999999999).epsilon(1e-12));
  CHECK(reg_inc_beta(0.5, 0.5, 0.3) == doctest::Approx(0.36901011956554536).epsilon(1e-12));
  CHECK(reg_inc_beta(5, 2, 0.9) == doctest::Approx(0.885735).epsilon(1e-12));
  CHECK(reg_inc_beta(10, 10, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(reg_inc_beta(2, 3, 0.0) == 0.0);
  CHECK(reg_inc_beta(2, 3, 1.0) == 1.0);
}

TEST_CASE("two-sided t p-values match scipy") {
  CHECK(student_t_two_sided_p(2.5, 18) == doctest::Approx(0.02230802023202223).epsilon(1e-12));
  CHECK(student_t_two_sided_p(1.0, 5) == doctest::Approx(0.36321746764912255).epsilon(1e-12));
  CHECK(student_t_two_sided_p(3.25, 38) ==
        doctest::Approx(0.0024191258531434264).epsilon(1e-12));
  // symmetric in the sign of t
  CHECK(student_t_two_sided_p(-2.5, 18) == student_t_two_sided_p(2.5, 18));
  CHECK(student_t_two_sided_p(0.0, 7) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("two-sided normal p-values") {
  CHECK(normal_two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(normal_two_sided_p(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(normal_two_sided_p(-1.959963984540054) == normal_two_sided_p(1.959963984540054));
}

TEST_CASE("type-7 quantile matches numpy.percentile") {
  const std::vector<double> v{3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
  CHECK(quantile_type7(v.data(), v.size(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(quantile_type7(v.data(), v.size(), 0.05) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quantile_type7(v.data(), v.size(), 0.25) == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(quantile_type7(v.data(), v.size(), 0.5) == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(quantile_type7(v.data(), v.size(), 0.75) == doctest::Approx(5.25).epsilon(1e-12));
  CHECK(quantile_type7(v.data(), v.size(), 0.95) ==
        doctest::Approx(7.949999999999998).epsilon(1e-12));
  CHECK(quantile_type7(v.data(), v.size(), 1.0) == doctest::Approx(9.0).epsilon(1e-15));
  const double one = 42.0;
  CHECK(quantile_type7(&one, 1, 0.3) == 42.0);
}

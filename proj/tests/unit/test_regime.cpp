#include <cmath>
#include <numbers>

#include "doctest.h"

#include "chemolab/errors.hpp"
#include "chemolab/regime.hpp"

using namespace chemolab;
using doctest::Approx;

TEST_CASE("power-type example points") {
  CHECK(classify_power(-1.0, 0.1, 3).region == Region::GlobalExistence);
  CHECK(classify_power(0.0, 1.0, 3).region == Region::FiniteTimeBlowup);
  CHECK(classify_power(0.5, 0.3, 4).region == Region::OpenGap);
  CHECK_FALSE(classify_power(0.0, 1.0, 3).basis.empty());
}

TEST_CASE("critical exponents are flagged") {
  const auto v = classify_power(0.0, 1.0 / 3.0, 3);  // p + 2q = 2/n
  CHECK(v.critical);
  CHECK(classify_power(0.1, 2.0 / 3.0, 3).critical);  // q = 2/n
}

TEST_CASE("volume-filling verdicts and mass thresholds") {
  const double pi = std::numbers::pi;
  CHECK(classify_volume_filling(2.0, 3).region == Region::GlobalWithInfiniteTimeBlowupExamples);
  const auto v1 = classify_volume_filling(1.0, 2);
  REQUIRE(v1.mass_threshold_general);
  CHECK(*v1.mass_threshold_general == Approx(8.0 * pi));
  CHECK(*v1.mass_threshold_radial == Approx(16.0 * pi));
  const auto vh = classify_volume_filling(0.5, 2);
  CHECK(*vh.mass_threshold_general == Approx(6.0 * pi));
  CHECK(*vh.mass_threshold_radial == Approx(12.0 * pi));

  CHECK(classify_volume_filling(1.0, 2, 0.5 * 16.0 * pi).region == Region::GlobalExistence);
  CHECK(classify_volume_filling(1.0, 2, 12.0 * pi).region == Region::GlobalExistence);  // radial
  CHECK(classify_volume_filling(1.0, 2, 12.0 * pi, false).region == Region::NotCovered);
  const auto crit = classify_volume_filling(1.0, 2, 16.0 * pi);
  CHECK(crit.critical);
  CHECK(classify_volume_filling(2.0, 2, 40.0 * pi).region == Region::GlobalWithInfiniteTimeBlowupExamples);
}

TEST_CASE("invalid classifier input") {
  CHECK_THROWS_AS(classify_power(0.0, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(classify_volume_filling(0.0, 2), ConfigError);
}

TEST_CASE("hypothesis checks for the linear-diffusion model") {
  const auto m = NonlinearityModel::power_type(0.0, 1.0);
  const HypothesisReport r = verify_hypotheses(m, 3, 1e6, 400);
  CHECK(r.g1.holds);
  CHECK(r.g1.best_alpha == Approx(1.0).epsilon(0.05));
  CHECK(r.g1.best_alpha > 2.0 / 3.0);
  CHECK(r.h1.holds);
  CHECK(r.psi.holds);
  // sup s/(s ln s + 2) is attained at s = 2
  CHECK(r.psi.constant_L == Approx(1.0 / (1.0 + std::log(2.0))).epsilon(1e-3));
  CHECK(hypothesis_constants_reproduce(m, r));
}

TEST_CASE("two-dimensional volume filling sits on the margin") {
  const auto m = NonlinearityModel::volume_filling(1.0);
  const HypothesisReport r = verify_hypotheses(m, 2, 1e6, 400);
  // G/s = 2 ln s - (2 + ln 2) + o(1): the exponent tends to 1 from above,
  // and H grows like 2s, so the bound on H fails.
  CHECK(r.gh2.applicable);
  CHECK(r.gh2.marginal);
  CHECK(r.gh2.mu > 1.0);
  CHECK(r.gh2.mu < 1.2);
  CHECK_FALSE(r.gh2.h_bound);
  CHECK_FALSE(r.gh2.holds);
  CHECK(hypothesis_constants_reproduce(m, r));
}

TEST_CASE("sensitivity bound stays finite for p=-1, q=0") {
  for (int n : {2, 3}) {
    const HypothesisReport r = verify_hypotheses(NonlinearityModel::power_type(-1.0, 0.0), n, 1e6, 300);
    CHECK(std::isfinite(r.psi.constant_L));
    CHECK(r.psi.constant_L > 0.0);
  }
}

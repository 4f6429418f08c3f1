#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"

#include "chemolab/errors.hpp"
#include "chemolab/stationary.hpp"

using namespace chemolab;
using doctest::Approx;

TEST_CASE("profile mean matches quadrature and centres the profile") {
  const double pi = std::numbers::pi;
  for (double k : {2.0, 16.0, 300.0})
    for (double R : {0.5, 1.0, 2.0}) {
      const double e2 = 1.0 / (k * k);
      auto raw = [&](double r) { return 2.0 * pi * r * std::log(e2 / std::pow(e2 + pi * r * r, 2)); };
      double integral = 0.0;
      // split at the concentration scale so the rule resolves it
      const double knee = std::min(R, 10.0 / k);
      integral += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(raw, 0.0, knee, 20, 1e-13);
      if (knee < R) integral += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(raw, knee, R, 20, 1e-13);
      CHECK(struwe_mean(k, R) == Approx(integral / (pi * R * R)).epsilon(1e-10));
    }
  CHECK(struwe_profile(0.0, 16.0, 1.0) > struwe_profile(0.5, 16.0, 1.0));
}

TEST_CASE("slope of the Moser-Trudinger functional along the sequence") {
  const double pi = std::numbers::pi;
  const std::vector<int> ks = {16, 32, 64, 128, 256, 512, 1024};
  for (double gamma : {0.5, 1.0}) {
    const auto crit = struwe_sweep(gamma, 8.0 * pi * (1.0 + gamma), 1.0, ks);
    CHECK(std::abs(crit.fitted_slope) <= 0.1 * 16.0 * pi);
    const auto super = struwe_sweep(gamma, 16.0 * pi * (1.0 + gamma), 1.0, ks);
    CHECK(super.predicted_slope == Approx(-16.0 * pi));
    CHECK(super.fitted_slope == Approx(-16.0 * pi).epsilon(0.1));
    const auto mid = struwe_sweep(gamma, 12.0 * pi * (1.0 + gamma), 1.0, ks);
    CHECK(mid.fitted_slope == Approx(-8.0 * pi).epsilon(0.1));
  }
}

TEST_CASE("lifted density keeps its mass and energy falls") {
  const double pi = std::numbers::pi;
  const double m = 32.0 * pi;
  for (int k : {16, 128, 1024}) CHECK(lifted_mass(1.0, m, 1.0, k) == Approx(m).epsilon(1e-9));
  double prev = lifted_energy(1.0, m, 1.0, 64);
  for (int k = 128; k <= 1024; k *= 2) {
    const double now = lifted_energy(1.0, m, 1.0, k);
    CHECK(prev - now >= 0.9 * 16.0 * pi * std::log(2.0));
    prev = now;
  }
}

TEST_CASE("least squares slope and argument checks") {
  CHECK(least_squares_slope({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0}) == Approx(2.0));
  CHECK_THROWS(struwe_sweep(1.0, 10.0, 1.0, {16}));
  const auto r = struwe_sweep(1.0, 10.0, 1.0, {16, 32});
  CHECK(struwe_csv(r).rfind("k,F_zk,F_lifted\n", 0) == 0);
}

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"

#include "chemolab/errors.hpp"
#include "chemolab/stationary.hpp"

using namespace chemolab;
using doctest::Approx;

TEST_CASE("constant solution for a given offset") {
  const auto m = NonlinearityModel::volume_filling(1.0);
  const double d = std::log(2.0) - 1.0;
  const StationaryProfile p = constant_profile(m, 1.0, 1.0, 64);
  CHECK(p.constant);
  CHECK(p.d == Approx(d).epsilon(1e-14));
  for (double v : p.v_bar) CHECK(v == Approx(1.0).epsilon(1e-14));
  CHECK(p.neumann_residual <= 1e-12);
  CHECK(p.pohozaev_residual <= 1e-12);
  for (double r : {0.25, 0.5, 1.0}) CHECK(std::abs(pohozaev_residual(p, m, r)) <= 1e-12);

  const auto found = find_stationary(m, 1.0, StationaryTarget::with_d(d), {.M = 128});
  bool has_constant = false;
  for (const auto& q : found)
    if (q.constant && std::abs(q.shoot_v0 - 1.0) < 1e-9) has_constant = true;
  CHECK(has_constant);
}

TEST_CASE("mass target recovers the constant branch") {
  const double pi = std::numbers::pi;
  const auto m = NonlinearityModel::volume_filling(1.0);
  const StationaryProfile p = solve_stationary(m, 1.0, StationaryTarget::with_mass(pi), {.M = 128});
  CHECK(p.m == Approx(pi).epsilon(1e-8));
  CHECK(p.d == Approx(std::log(2.0) - 1.0).epsilon(1e-7));
  CHECK(p.shoot_v0 == Approx(1.0).epsilon(1e-7));
}

TEST_CASE("energies over a scan are bounded below") {
  const double pi = std::numbers::pi;
  const auto m = NonlinearityModel::volume_filling(1.0);
  const auto at_4pi = find_stationary(m, 1.0, StationaryTarget::with_mass(4.0 * pi), {.M = 128});
  REQUIRE_FALSE(at_4pi.empty());
  double lowest = std::numeric_limits<double>::infinity();
  for (double d : {-30.0, -20.0, -10.0, -5.0, -1.0}) {
    for (const auto& p : find_stationary(m, 1.0, StationaryTarget::with_d(d), {.M = 128})) {
      CHECK(std::isfinite(p.F_value));
      lowest = std::min(lowest, p.F_value);
    }
  }
  CHECK(std::isfinite(lowest));
}

TEST_CASE("primitive matches independent quadrature") {
  const auto m = NonlinearityModel::volume_filling(1.0);
  for (double d : {-20.0, -1.0, 0.5})
    for (double s : {0.5, 3.0, 12.0}) {
      const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double x) { return m.Xi_inverse(x + d); }, 0.0, s, 15, 1e-13);
      CHECK(pohozaev_primitive(m, d, s) == Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("nonconstant branch and residual sensitivity") {
  const auto m = NonlinearityModel::volume_filling(1.0);
  StationaryOptions opt;
  opt.M = 512;
  opt.v0_guess = 28.36;
  const StationaryProfile p = solve_stationary(m, 1.0, StationaryTarget::with_d(-20.0), opt);
  REQUIRE_FALSE(p.constant);
  CHECK(p.shoot_v0 == Approx(28.3607394).epsilon(1e-6));
  CHECK(p.neumann_residual < 1e-8);
  const double converged = std::abs(pohozaev_residual(p, m, 0.5));
  CHECK(converged / pohozaev_terms(p, m, 0.5).scale() < 1e-8);

  StationaryProfile bumped = p;
  for (std::size_t i = 0; i < bumped.v_nodes.size(); ++i) {
    const double r = bumped.r_nodes[i];
    bumped.v_nodes[i] += 0.1 * std::exp(-50.0 * (r - 0.3) * (r - 0.3));
    bumped.dv_nodes[i] += 0.1 * -100.0 * (r - 0.3) * std::exp(-50.0 * (r - 0.3) * (r - 0.3));
  }
  CHECK(std::abs(pohozaev_residual(bumped, m, 0.5)) > 10.0 * std::max(converged, 1e-14));
}

TEST_CASE("csv and json exports") {
  const auto m = NonlinearityModel::volume_filling(1.0);
  const StationaryProfile p = constant_profile(m, 1.0, 2.0, 16);
  const std::string csv = profile_csv(p);
  CHECK(csv.rfind("r,v_bar,u_bar\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
  CHECK(profile_json(p).find("\"d\"") != std::string::npos);
}

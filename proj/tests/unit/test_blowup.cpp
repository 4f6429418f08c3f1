#include <cmath>
#include <vector>

#include "doctest.h"

#include "chemolab/blowup.hpp"

using namespace chemolab;
using doctest::Approx;

namespace {

using History = std::vector<std::pair<double, double>>;

}  // namespace

TEST_CASE("inverse-linear growth is read as finite-time blowup") {
  History sup, dt;
  for (int i = 0; i <= 400; ++i) {
    const double t = 0.99 * i / 400.0;
    sup.emplace_back(t, 1.0 / (1.0 - t));
    dt.emplace_back(t, 1e-3 * (1.0 - t) * (1.0 - t));
  }
  BlowupCriteria c;
  c.blowup_threshold = 50.0;
  c.dt_min = 1e-9;
  const auto v = detect_blowup(sup, dt, c);
  CHECK(v.status == BlowupStatus::SuspectedFiniteTimeBlowup);
  REQUIRE(v.t_star_estimate);
  CHECK(std::abs(*v.t_star_estimate - 1.0) <= 0.05);
  CHECK(v.kappa == Approx(1.0).epsilon(0.05));
  CHECK(v.power_law_rms < v.poly_log_rms);
}

TEST_CASE("logarithmic growth is read as infinite-time growth") {
  History sup, dt;
  for (int i = 0; i <= 2000; ++i) {
    const double t = 1e5 * i / 2000.0;
    sup.emplace_back(t, 1.0 + std::log1p(t));
    dt.emplace_back(t, 1e-2);
  }
  const auto v = detect_blowup(sup, dt, BlowupCriteria{});
  CHECK(v.status == BlowupStatus::SuspectedInfiniteTimeGrowth);
  CHECK_FALSE(v.dt_collapsed);
}

TEST_CASE("constant and decaying histories are bounded") {
  History sup, dt, decay;
  for (int i = 0; i <= 100; ++i) {
    sup.emplace_back(0.1 * i, 3.0);
    decay.emplace_back(0.1 * i, 3.0 + std::exp(-0.1 * i));
    dt.emplace_back(0.1 * i, 1e-3);
  }
  CHECK(detect_blowup(sup, dt, BlowupCriteria{}).status == BlowupStatus::Bounded);
  CHECK(detect_blowup(decay, dt, BlowupCriteria{}).status == BlowupStatus::Bounded);
}

TEST_CASE("short histories are inconclusive") {
  History sup = {{0.0, 1.0}, {0.1, 1.0}, {0.2, 1.0}};
  CHECK(detect_blowup(sup, {}, BlowupCriteria{}).status == BlowupStatus::Inconclusive);
}

TEST_CASE("growth beyond the threshold with steady steps is not finite-time") {
  History sup, dt;
  for (int i = 0; i <= 300; ++i) {
    const double t = 0.1 * i;
    sup.emplace_back(t, std::exp(0.5 * t));
    dt.emplace_back(t, 1e-3);
  }
  BlowupCriteria c;
  c.blowup_threshold = 1e5;
  const auto v = detect_blowup(sup, dt, c);
  CHECK(v.threshold_crossed);
  CHECK_FALSE(v.dt_collapsed);
  CHECK(v.status != BlowupStatus::SuspectedFiniteTimeBlowup);
}

TEST_CASE("status names") {
  CHECK(to_string(BlowupStatus::Bounded) == "Bounded");
  CHECK(to_string(BlowupStatus::SuspectedFiniteTimeBlowup) == "SuspectedFiniteTimeBlowup");
  CHECK(to_string(BlowupStatus::SuspectedInfiniteTimeGrowth) == "SuspectedInfiniteTimeGrowth");
  CHECK(to_string(BlowupStatus::Inconclusive) == "Inconclusive");
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chemolab/nonlinearity.hpp"

namespace chemolab {

enum class Region {
  GlobalExistence,
  GlobalWithInfiniteTimeBlowupExamples,
  FiniteTimeBlowup,
  OpenGap,
  NotCovered,
};

std::string to_string(Region r);

struct RegimeVerdict {
  Region region = Region::NotCovered;
  std::string basis;  // which criterion placed the point in its region
  std::string family;  // "power" or "volume_filling"
  double p = 0.0;
  double q = 0.0;
  double gamma = 0.0;
  int n = 2;
  bool critical = false;  // on a boundary the theory excludes
  // Two-dimensional volume filling only: mass thresholds 4 pi (1+gamma)
  // (general domains) and 8 pi (1+gamma) (radial data).
  std::optional<double> mass_threshold_general;
  std::optional<double> mass_threshold_radial;
  std::string note;
};

/// Independent evaluation of every region predicate. classify_power returns
/// the unique true one; the partition test checks that exactly one holds.
struct RegionMembership {
  bool global_existence = false;
  bool infinite_time_examples = false;
  bool finite_time_blowup = false;
  bool open_gap = false;
  bool not_covered = false;
  int count() const {
    return int(global_existence) + int(infinite_time_examples) + int(finite_time_blowup) +
           int(open_gap) + int(not_covered);
  }
};

RegionMembership power_region_membership(double p, double q, int n);
RegimeVerdict classify_power(double p, double q, int n);

/// Volume filling with exponent gamma. In two dimensions the verdict carries
/// both mass thresholds; passing a mass refines the region for that mass.
RegimeVerdict classify_volume_filling(double gamma, int n,
                                      std::optional<double> mass = std::nullopt,
                                      bool radial = true);

struct SampleGrid {
  double s_low = 0.0;   // start of the sub-s0 grid used by the "s > 0" checks
  double s0 = 1.0;
  double s_max = 0.0;
  int size = 0;
  std::vector<double> lower;  // log-spaced in [s_low, s0)
  std::vector<double> upper;  // log-spaced in [s0, s_max]
};

struct G1Check {
  bool holds = false;
  double best_alpha = 0.0;
  double constant_a = 0.0;
  bool inconclusive = false;
};

struct H1Check {
  bool holds = false;
  double best_gamma = 0.0;
  double constant_b = 1.0;
  bool inconclusive = false;
};

struct PsiCheck {
  bool holds = false;
  double constant_L = 0.0;
  bool inconclusive = false;
};

struct BalanceCheck {
  bool holds = false;
  double p = 0.0;
  double q = 0.0;
  double D1 = 0.0;
  double D2 = 0.0;
};

struct GH2Check {
  bool applicable = false;  // n == 2 only
  bool holds = false;
  double mu = 0.0;
  double a = 0.0;
  double b = 0.0;
  bool g_bound = false;
  bool h_bound = false;
  bool marginal = false;  // mu within 0.2 of 1 (ln s converges slowly)
  double s_start = 0.0;
};

struct HypothesisReport {
  std::string model;
  int n = 2;
  G1Check g1;
  H1Check h1;
  PsiCheck psi;
  BalanceCheck balance;
  GH2Check gh2;
  SampleGrid grid;
};

HypothesisReport verify_hypotheses(const NonlinearityModel& model, int n, double s_max,
                                   int grid_size);

/// Re-evaluates every stored inequality on the stored grid. Returns false if
/// any stored constant fails to bound its quotient.
bool hypothesis_constants_reproduce(const NonlinearityModel& model,
                                    const HypothesisReport& report);

}  // namespace chemolab

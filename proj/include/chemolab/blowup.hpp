#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chemolab {

enum class BlowupStatus { Bounded, SuspectedFiniteTimeBlowup, SuspectedInfiniteTimeGrowth, Inconclusive };

std::string to_string(BlowupStatus s);

struct BlowupVerdict {
  BlowupStatus status = BlowupStatus::Inconclusive;
  std::optional<double> t_star_estimate;
  std::vector<std::pair<double, double>> sup_history;  // (t, sup u)
  double power_law_rms = 0.0;  // residual of log sup ~ c - kappa log(T* - t)
  double poly_log_rms = 0.0;   // residual of log sup ~ a + b L + c L^2, L = ln(1+t)
  double kappa = 0.0;
  bool threshold_crossed = false;
  bool dt_collapsed = false;
  std::string note;
};

struct BlowupCriteria {
  double blowup_threshold = 1e6;
  double dt_min = 1e-12;
  // dt counts as collapsed once the tail steps are within this factor of dt_min
  double collapse_factor = 100.0;
};

/// Classifies a sup-norm history. dt_history holds (t, accepted dt) pairs;
/// only its tail matters. Fewer than 10 samples give Inconclusive.
BlowupVerdict detect_blowup(const std::vector<std::pair<double, double>>& sup_history,
                            const std::vector<std::pair<double, double>>& dt_history,
                            const BlowupCriteria& criteria);

}  // namespace chemolab

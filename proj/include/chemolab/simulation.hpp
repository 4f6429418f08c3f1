#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chemolab/blowup.hpp"
#include "chemolab/diagnostics.hpp"
#include "chemolab/grid.hpp"
#include "chemolab/nonlinearity.hpp"
#include "chemolab/solver.hpp"

namespace chemolab {

enum class InitialFamily { ConstantPair, GaussianBump, EnergyTargetedBump };

struct InitialDataSpec {
  InitialFamily family = InitialFamily::GaussianBump;
  double c = 1.0;        // ConstantPair level
  double mass = 1.0;     // GaussianBump / EnergyTargetedBump
  double sigma = 0.2;    // GaussianBump width
  double floor = 0.1;    // GaussianBump background level (before renormalization)
  double A = 0.0;        // bound on the W^{1,2} norm of v0 (0 disables the check)
  double target_energy = 0.0;  // stop concentrating once F(u0, v0) <= target
  double k_start = 1.0;        // first concentration parameter tried
  std::optional<double> lambda;  // amplitude of v0; defaults to 1+gamma (volume filling) or 1
};

/// Generated data plus the concentration actually used (EnergyTargetedBump).
struct InitialData {
  RadialState state;
  double k = 0.0;
  double d = 0.0;
  double energy = 0.0;
};

InitialData make_initial_data_ex(const InitialDataSpec& spec, const RadialGrid& grid,
                                 const NonlinearityModel& model);
RadialState make_initial_data(const InitialDataSpec& spec, const RadialGrid& grid,
                              const NonlinearityModel& model);

struct SimConfig {
  int n = 2;
  double R = 1.0;
  int M = 256;
  double stretch = 1.0;
  NonlinearityModel model = NonlinearityModel::volume_filling(1.0);
  FaceScheme scheme = FaceScheme::Upwind;
  double dt_init = 1e-6;
  double dt_min = 1e-12;
  double dt_max = 1e-2;
  double cfl_safety = 0.9;
  double t_end = 1.0;
  // Absolute sup-norm cap. When blowup_factor > 0 the cap is instead
  // blowup_factor times the initial sup.
  double blowup_threshold = 1e8;
  double blowup_factor = 0.0;
  InitialDataSpec initial;
  double output_dt = 0.1;   // diagnostics cadence in simulated time
  std::vector<double> lp_exponents;  // empty: {2, gamma + 2} (or {2, 3})
  long max_steps = 0;               // 0: unlimited
  int stagnation_steps = 1000;      // consecutive steps with the CFL bound below dt_min
  std::string checkpoint_path;      // empty: no checkpoints
  long checkpoint_every = 0;        // steps between checkpoints
  std::string restart_path;         // resume from this checkpoint when set
};

void validate(const SimConfig& config);
std::vector<double> default_exponents(const NonlinearityModel& model);

enum class StopReason { EndTime, ThresholdCrossed, Stagnation, StepLimit };
std::string to_string(StopReason r);

struct StepInfo {
  const RadialState& prev;
  const RadialState& next;
  double dt;
};

struct RunResult {
  std::vector<DiagnosticsRecord> history;
  BlowupVerdict verdict;
  RadialState final_state;
  RadialGrid grid;
  long steps = 0;
  long rejected = 0;
  double sup_initial = 0.0;
  double mass_initial = 0.0;
  double max_mass_drift = 0.0;  // max relative |mass - mass0| over accepted steps
  double min_dt = 0.0;
  StopReason stop = StopReason::EndTime;
  std::vector<std::pair<double, double>> dt_history;
  double dt_next = 0.0;  // step size the run would have tried next
  int stagnant = 0;      // consecutive steps with the CFL bound below dt_min
};

using StepObserver = std::function<void(const StepInfo&)>;

RunResult run(const SimConfig& config, const StepObserver& observer = {});

// Checkpoint files: fixed header then u and v as little-endian doubles.
struct Checkpoint {
  int n = 2;
  double R = 1.0;
  int M = 0;
  double stretch = 1.0;
  int model_kind = 0;
  double p = 0.0, q = 0.0, gamma = 0.0, s0 = 1.0;
  int scheme = 0;
  long steps = 0;
  double dt_next = 0.0;
  double sup_initial = 0.0;
  double mass_initial = 0.0;
  int stagnant = 0;
  RadialState state;
};

Checkpoint make_checkpoint(const SimConfig& config, const RadialState& state, long steps,
                           double dt_next, double sup_initial, double mass_initial, int stagnant);
/// Checkpoint of the final state of a run; restarting from it continues the run.
Checkpoint final_checkpoint(const SimConfig& config, const RunResult& result);

void write_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace chemolab

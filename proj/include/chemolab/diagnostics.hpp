#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chemolab/grid.hpp"
#include "chemolab/nonlinearity.hpp"
#include "chemolab/solver.hpp"

namespace chemolab {

// Floor applied to u before evaluating G(u), G'(u) and u ln u.
inline constexpr double kDensityFloor = 1e-30;

struct DiagnosticsRecord {
  double t = 0.0;
  double F = 0.0;
  double D = 0.0;
  double mass_u = 0.0;
  double mass_v = 0.0;
  double sup_u = 0.0;
  double entropy = 0.0;    // sum V u ln u, with 0 ln 0 = 0
  double grad_v_L2 = 0.0;  // squared: sum over faces of k (dv)^2
  double v_t_L2 = 0.0;     // squared: sum V ((v' - v)/dt)^2
  std::vector<std::pair<double, double>> lp_norms;  // (exponent, norm)
};

double liapunov_F(const RadialState& state, const RadialGrid& grid,
                  const NonlinearityModel& model);

/// F(next) - F(prev) accumulated cell by cell, which keeps the roundoff of
/// the difference proportional to the change rather than to |F|.
double liapunov_F_change(const RadialState& prev, const RadialState& next,
                         const RadialGrid& grid, const NonlinearityModel& model);

double dissipation_D(const RadialState& prev, const RadialState& next, double dt,
                     const RadialGrid& grid, const NonlinearityModel& model,
                     FaceScheme scheme = FaceScheme::Upwind);

/// Norm fragment of a record (t, masses, sup, entropy, grad v, L^p norms).
DiagnosticsRecord norms(const RadialState& state, const RadialGrid& grid,
                        const std::vector<double>& exponents);

/// Full record; v_t and D need the previous state and are zero without one.
DiagnosticsRecord make_record(const RadialState& state, const RadialState* prev,
                              const RadialGrid& grid, const NonlinearityModel& model,
                              const std::vector<double>& exponents,
                              FaceScheme scheme = FaceScheme::Upwind);

// Default regularization of the energy-identity quotient.
inline constexpr double kResidualFloor = 1e-8;

/// rho_k = |F_{k+1} - F_k + dt_k D_k| / (dt_k max(D_k, eps)) for consecutive
/// states; dt_k is the time difference of the pair.
std::vector<double> energy_identity_residual(const std::vector<RadialState>& states,
                                             const RadialGrid& grid,
                                             const NonlinearityModel& model,
                                             FaceScheme scheme = FaceScheme::Upwind,
                                             double eps = kResidualFloor);

std::string csv_header(const std::vector<double>& exponents);
std::string csv_row(const DiagnosticsRecord& rec);

}  // namespace chemolab

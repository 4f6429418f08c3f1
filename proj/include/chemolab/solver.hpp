#pragma once

#include <span>
#include <vector>

#include "chemolab/grid.hpp"
#include "chemolab/nonlinearity.hpp"

namespace chemolab {

struct RadialState {
  double t = 0.0;
  std::vector<double> u;  // cell averages of the density
  std::vector<double> v;  // cell averages of the chemoattractant
};

enum class FaceScheme { Upwind, Central };

/// Face fluxes of the u-equation. flux[f] is the flux density across face f
/// from cell f to cell f-1 (so it enters cell f-1), i.e.
///   (Phi(u_f) - Phi(u_{f-1}))/d - psi_face (v_f - v_{f-1})/d,
/// with psi_face taken upwind of the chemotactic drift (or centrally).
/// Boundary faces 0 and M carry zero flux.
struct FaceFluxes {
  std::vector<double> flux;
  std::vector<double> psi_face;
  std::vector<double> d_kirchhoff;  // Phi(u_f) - Phi(u_{f-1})
};

void compute_u_fluxes(std::span<const double> u, std::span<const double> v,
                      const RadialGrid& grid, const NonlinearityModel& model, FaceScheme scheme,
                      FaceFluxes& out);

/// Owns a state and the per-cell workspaces of the splitting scheme:
/// v by backward Euler (tridiagonal solve), then u by an explicit
/// conservative step in flux form using the new v.
class Stepper {
 public:
  Stepper(const RadialGrid& grid, NonlinearityModel model, FaceScheme scheme);

  void reset(RadialState state);
  const RadialState& state() const { return state_; }
  const RadialState& previous() const { return previous_; }
  const RadialGrid& grid() const { return grid_; }
  const NonlinearityModel& model() const { return model_; }
  FaceScheme scheme() const { return scheme_; }

  /// Largest dt keeping the explicit u-update monotone, scaled by cfl.
  double stable_dt(double cfl) const;

  /// Advances by dt. Returns false and leaves the state untouched if the
  /// u-update would produce a negative density. Throws NumericsError on
  /// non-finite values or a failed linear solve.
  bool try_step(double dt);

 private:
  void refresh_point_values();
  void solve_v(double dt);

  RadialGrid grid_;
  NonlinearityModel model_;
  FaceScheme scheme_;
  RadialState state_;
  RadialState previous_;
  std::vector<PointValues> point_;
  std::vector<double> v_new_, u_new_, lower_, diag_, upper_, rhs_, scratch_;
};

/// One step of the scheme; throws StepRejected on a negative density.
RadialState step(const RadialState& state, const RadialGrid& grid,
                 const NonlinearityModel& model, double dt,
                 FaceScheme scheme = FaceScheme::Upwind);

/// Volume-weighted integral of a per-cell field.
double integrate_cells(std::span<const double> f, const RadialGrid& grid);

/// Solves (I - Laplacian) v = u with Neumann conditions on the grid.
std::vector<double> solve_elliptic(std::span<const double> u, const RadialGrid& grid);

}  // namespace chemolab

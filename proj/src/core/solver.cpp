#include "chemolab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "chemolab/errors.hpp"

namespace chemolab {

namespace {

// Thomas algorithm for a diagonally dominant tridiagonal system. lower[0]
// and upper[M-1] are ignored. scratch must have size M. Solution in rhs.
void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                       const std::vector<double>& upper, std::vector<double>& rhs,
                       std::vector<double>& scratch) {
  const std::size_t m = diag.size();
  double denom = diag[0];
  if (!(std::abs(denom) > 0.0)) throw NumericsError("tridiagonal solve: zero pivot");
  scratch[0] = upper[0] / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < m; ++i) {
    denom = diag[i] - lower[i] * scratch[i - 1];
    if (!(std::abs(denom) > 0.0) || !std::isfinite(denom))
      throw NumericsError("tridiagonal solve: zero pivot");
    scratch[i] = (i + 1 < m) ? upper[i] / denom : 0.0;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = m - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

double face_psi(FaceScheme scheme, double dv, const PointValues& left, const PointValues& right) {
  if (scheme == FaceScheme::Central) return 0.5 * (left.psi + right.psi);
  // drift +psi grad v: positive dv carries mass out of the left cell
  return dv > 0.0 ? left.psi : right.psi;
}

}  // namespace

void compute_u_fluxes(std::span<const double> u, std::span<const double> v,
                      const RadialGrid& grid, const NonlinearityModel& model, FaceScheme scheme,
                      FaceFluxes& out) {
  const int M = grid.M;
  out.flux.assign(M + 1, 0.0);
  out.psi_face.assign(M + 1, 0.0);
  out.d_kirchhoff.assign(M + 1, 0.0);
  PointValues left = model.point(u[0]);
  for (int f = 1; f < M; ++f) {
    const PointValues right = model.point(u[f]);
    const double dv = v[f] - v[f - 1];
    const double psi = face_psi(scheme, dv, left, right);
    const double dphi = right.kirchhoff - left.kirchhoff;
    out.psi_face[f] = psi;
    out.d_kirchhoff[f] = dphi;
    out.flux[f] = grid.transmissibility[f] * (dphi - psi * dv);
    left = right;
  }
}

Stepper::Stepper(const RadialGrid& grid, NonlinearityModel model, FaceScheme scheme)
    : grid_(grid), model_(std::move(model)), scheme_(scheme) {
  const std::size_t M = grid_.M;
  point_.resize(M);
  v_new_.resize(M);
  u_new_.resize(M);
  lower_.resize(M);
  diag_.resize(M);
  upper_.resize(M);
  rhs_.resize(M);
  scratch_.resize(M);
}

void Stepper::reset(RadialState state) {
  if (state.u.size() != std::size_t(grid_.M) || state.v.size() != std::size_t(grid_.M))
    throw ConfigError("Stepper: state size does not match grid");
  state_ = std::move(state);
  previous_ = state_;
  refresh_point_values();
}

void Stepper::refresh_point_values() {
  for (int i = 0; i < grid_.M; ++i) point_[i] = model_.point(state_.u[i]);
}

double Stepper::stable_dt(double cfl) const {
  const int M = grid_.M;
  const auto& k = grid_.transmissibility;
  const auto& v = state_.v;
  double rate = 0.0;
  for (int i = 0; i < M; ++i) {
    double phi_max = point_[i].phi;
    if (i > 0) phi_max = std::max(phi_max, point_[i - 1].phi);
    if (i + 1 < M) phi_max = std::max(phi_max, point_[i + 1].phi);
    double r = (k[i] + k[i + 1]) * phi_max;
    // faces where upwinding draws psi from this cell: drift pointing away
    if (i > 0 && v[i - 1] > v[i]) r += k[i] * (v[i - 1] - v[i]) * point_[i].beta;
    if (i + 1 < M && v[i + 1] > v[i]) r += k[i + 1] * (v[i + 1] - v[i]) * point_[i].beta;
    rate = std::max(rate, r / grid_.volumes[i]);
  }
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return cfl / rate;
}

void Stepper::solve_v(double dt) {
  const int M = grid_.M;
  const auto& k = grid_.transmissibility;
  const auto& V = grid_.volumes;
  const auto& v = state_.v;
  const auto& u = state_.u;
  // Increment form of backward Euler: (V(1+dt) + dt K) dv = dt (-K v - V v + V u).
  for (int i = 0; i < M; ++i) {
    const double kl = k[i], kr = k[i + 1];
    lower_[i] = -dt * kl;
    upper_[i] = -dt * kr;
    diag_[i] = V[i] * (1.0 + dt) + dt * (kl + kr);
    double lap = 0.0;
    if (i + 1 < M) lap += kr * (v[i + 1] - v[i]);
    if (i > 0) lap -= kl * (v[i] - v[i - 1]);
    rhs_[i] = dt * (lap + V[i] * (u[i] - v[i]));
  }
  solve_tridiagonal(lower_, diag_, upper_, rhs_, scratch_);
  for (int i = 0; i < M; ++i) {
    const double vn = v[i] + rhs_[i];
    if (!std::isfinite(vn)) throw NumericsError("v-update produced a non-finite value");
    v_new_[i] = vn < 0.0 ? 0.0 : vn;
  }
}

bool Stepper::try_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw NumericsError("try_step: invalid time step");
  const int M = grid_.M;
  const auto& k = grid_.transmissibility;
  const auto& u = state_.u;
  solve_v(dt);

  double inflow_right = 0.0;  // flux across face i+1 into cell i
  double inflow_left = 0.0;   // flux across face i into cell i-1 (leaves cell i)
  for (int i = 0; i < M; ++i) {
    inflow_left = inflow_right;
    if (i + 1 < M) {
      const double dv = v_new_[i + 1] - v_new_[i];
      const double psi = face_psi(scheme_, dv, point_[i], point_[i + 1]);
      inflow_right = k[i + 1] * (point_[i + 1].kirchhoff - point_[i].kirchhoff - psi * dv);
    } else {
      inflow_right = 0.0;
    }
    const double un = u[i] + dt / grid_.volumes[i] * (inflow_right - inflow_left);
    if (!std::isfinite(un)) throw NumericsError("u-update produced a non-finite value");
    if (un < 0.0) return false;
    u_new_[i] = un;
  }

  std::swap(previous_, state_);
  state_.t = previous_.t + dt;
  state_.u.assign(u_new_.begin(), u_new_.end());
  state_.v.assign(v_new_.begin(), v_new_.end());
  refresh_point_values();
  return true;
}

RadialState step(const RadialState& state, const RadialGrid& grid,
                 const NonlinearityModel& model, double dt, FaceScheme scheme) {
  Stepper stepper(grid, model, scheme);
  stepper.reset(state);
  if (!stepper.try_step(dt)) {
    std::ostringstream msg;
    msg << "negative density after step with dt = " << dt;
    throw StepRejected(msg.str());
  }
  return stepper.state();
}

double integrate_cells(std::span<const double> f, const RadialGrid& grid) {
  double sum = 0.0;
  for (int i = 0; i < grid.M; ++i) sum += grid.volumes[i] * f[i];
  return sum;
}

std::vector<double> solve_elliptic(std::span<const double> u, const RadialGrid& grid) {
  const int M = grid.M;
  const auto& k = grid.transmissibility;
  std::vector<double> lower(M), diag(M), upper(M), rhs(M), scratch(M);
  for (int i = 0; i < M; ++i) {
    lower[i] = -k[i];
    upper[i] = -k[i + 1];
    diag[i] = grid.volumes[i] + k[i] + k[i + 1];
    rhs[i] = grid.volumes[i] * u[i];
  }
  solve_tridiagonal(lower, diag, upper, rhs, scratch);
  return rhs;
}

}  // namespace chemolab

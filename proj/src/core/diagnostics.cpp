#include "chemolab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "chemolab/errors.hpp"

namespace chemolab {

namespace {

double floored(double u) { return std::max(u, kDensityFloor); }

double cell_energy(double u, double v, const NonlinearityModel& model) {
  return 0.5 * v * v - u * v + model.G(floored(u));
}

double gradient_energy(const std::vector<double>& v, const RadialGrid& grid) {
  double sum = 0.0;
  for (int f = 1; f < grid.M; ++f) {
    const double dv = v[f] - v[f - 1];
    sum += grid.transmissibility[f] * dv * dv;
  }
  return sum;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double liapunov_F(const RadialState& state, const RadialGrid& grid,
                  const NonlinearityModel& model) {
  double sum = 0.5 * gradient_energy(state.v, grid);
  for (int i = 0; i < grid.M; ++i)
    sum += grid.volumes[i] * cell_energy(state.u[i], state.v[i], model);
  return sum;
}

double liapunov_F_change(const RadialState& prev, const RadialState& next,
                         const RadialGrid& grid, const NonlinearityModel& model) {
  double sum = 0.0;
  for (int f = 1; f < grid.M; ++f) {
    const double a = prev.v[f] - prev.v[f - 1];
    const double b = next.v[f] - next.v[f - 1];
    sum += 0.5 * grid.transmissibility[f] * (b - a) * (b + a);
  }
  for (int i = 0; i < grid.M; ++i) {
    const double dG = model.G(floored(next.u[i])) - model.G(floored(prev.u[i]));
    const double dv = next.v[i] - prev.v[i];
    const double dquad = 0.5 * dv * (next.v[i] + prev.v[i]);
    const double duv = next.u[i] * next.v[i] - prev.u[i] * prev.v[i];
    sum += grid.volumes[i] * (dquad - duv + dG);
  }
  return sum;
}

double dissipation_D(const RadialState& prev, const RadialState& next, double dt,
                     const RadialGrid& grid, const NonlinearityModel& model, FaceScheme scheme) {
  if (!(dt > 0.0)) throw ConfigError("dissipation_D: dt must be positive");
  double sum = 0.0;
  for (int i = 0; i < grid.M; ++i) {
    const double vt = (next.v[i] - prev.v[i]) / dt;
    sum += grid.volumes[i] * vt * vt;
  }
  // Flux part: u-fluxes of the step (old u, new v) divided by a face value
  // of psi consistent with the Kirchhoff difference, psi_c = dPhi / dG'.
  FaceFluxes fl;
  compute_u_fluxes(prev.u, next.v, grid, model, scheme, fl);
  for (int f = 1; f < grid.M; ++f) {
    const double k = grid.transmissibility[f];
    if (k == 0.0 || fl.flux[f] == 0.0) continue;
    const double dgp = model.G_prime(floored(prev.u[f])) - model.G_prime(floored(prev.u[f - 1]));
    double psi_c;
    if (dgp != 0.0 && fl.d_kirchhoff[f] != 0.0) {
      psi_c = fl.d_kirchhoff[f] / dgp;
    } else {
      psi_c = model.psi(0.5 * (prev.u[f] + prev.u[f - 1]));
    }
    const double flux = fl.flux[f] / k;  // flux density times distance
    if (psi_c > 0.0) sum += flux * flux * k / psi_c;
  }
  return sum;
}

DiagnosticsRecord norms(const RadialState& state, const RadialGrid& grid,
                        const std::vector<double>& exponents) {
  DiagnosticsRecord rec;
  rec.t = state.t;
  double sup = 0.0, mu = 0.0, mv = 0.0, ent = 0.0;
  for (int i = 0; i < grid.M; ++i) {
    const double u = state.u[i];
    sup = std::max(sup, u);
    mu += grid.volumes[i] * u;
    mv += grid.volumes[i] * state.v[i];
    if (u > 0.0) ent += grid.volumes[i] * u * std::log(u);
  }
  rec.sup_u = sup;
  rec.mass_u = mu;
  rec.mass_v = mv;
  rec.entropy = ent;
  rec.grad_v_L2 = gradient_energy(state.v, grid);
  for (double p : exponents) {
    if (!(p >= 1.0)) throw ConfigError("norms: exponents must be >= 1");
    double s = 0.0;
    for (int i = 0; i < grid.M; ++i) s += grid.volumes[i] * std::pow(state.u[i], p);
    rec.lp_norms.emplace_back(p, std::pow(s, 1.0 / p));
  }
  return rec;
}

DiagnosticsRecord make_record(const RadialState& state, const RadialState* prev,
                              const RadialGrid& grid, const NonlinearityModel& model,
                              const std::vector<double>& exponents, FaceScheme scheme) {
  DiagnosticsRecord rec = norms(state, grid, exponents);
  rec.F = liapunov_F(state, grid, model);
  if (prev != nullptr && state.t > prev->t) {
    const double dt = state.t - prev->t;
    double vt = 0.0;
    for (int i = 0; i < grid.M; ++i) {
      const double d = (state.v[i] - prev->v[i]) / dt;
      vt += grid.volumes[i] * d * d;
    }
    rec.v_t_L2 = vt;
    rec.D = dissipation_D(*prev, state, dt, grid, model, scheme);
  }
  return rec;
}

std::vector<double> energy_identity_residual(const std::vector<RadialState>& states,
                                             const RadialGrid& grid,
                                             const NonlinearityModel& model, FaceScheme scheme,
                                             double eps) {
  if (states.size() < 2) throw ConfigError("energy_identity_residual: need at least two states");
  std::vector<double> out;
  out.reserve(states.size() - 1);
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const RadialState& a = states[k];
    const RadialState& b = states[k + 1];
    const double dt = std::abs(b.t - a.t);
    if (!(dt > 0.0)) throw ConfigError("energy_identity_residual: states must differ in time");
    const double D = dissipation_D(a, b, dt, grid, model, scheme);
    const double dF = liapunov_F_change(a, b, grid, model);
    out.push_back(std::abs(dF + dt * D) / (dt * std::max(D, eps)));
  }
  return out;
}

std::string csv_header(const std::vector<double>& exponents) {
  std::string h = "t,F,D,mass_u,mass_v,sup_u,entropy,grad_v_L2,v_t_L2";
  for (double p : exponents) h += ",L" + format_double(p);
  return h;
}

std::string csv_row(const DiagnosticsRecord& rec) {
  std::string row;
  for (double x : {rec.t, rec.F, rec.D, rec.mass_u, rec.mass_v, rec.sup_u, rec.entropy,
                   rec.grad_v_L2, rec.v_t_L2}) {
    if (!row.empty()) row += ',';
    row += format_double(x);
  }
  for (const auto& [p, val] : rec.lp_norms) row += ',' + format_double(val);
  return row;
}

}  // namespace chemolab

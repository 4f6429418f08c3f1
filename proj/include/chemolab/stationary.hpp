#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chemolab/grid.hpp"
#include "chemolab/nonlinearity.hpp"

namespace chemolab {

/// Radial solution of  v'' + v'/r - v + Xi^{-1}(v + d) = 0 on (0, R), v'(0) = v'(R) = 0.
struct StationaryProfile {
  RadialGrid grid;              // n = 2, cells of width R/M
  std::vector<double> v_bar;    // values at cell centres
  std::vector<double> u_bar;    // Xi^{-1}(v_bar + d)
  // ODE nodes at spacing R/(2M): every face and every centre is a node.
  std::vector<double> r_nodes, v_nodes, dv_nodes;
  double d = 0.0;
  double m = 0.0;               // integral of u_bar
  double mass_v = 0.0;          // integral of v_bar
  double F_value = 0.0;         // Liapunov energy of (u_bar, v_bar)
  double neumann_residual = 0.0;  // |v'(R)|
  double pohozaev_residual = 0.0; // relative residual at R/2
  double shoot_v0 = 0.0;        // v_bar(0)
  bool constant = false;
};

struct StationaryTarget {
  enum class Kind { D, Mass } kind = Kind::D;
  double value = 0.0;
  static StationaryTarget with_d(double d) { return {Kind::D, d}; }
  static StationaryTarget with_mass(double m) { return {Kind::Mass, m}; }
};

struct StationaryOptions {
  int M = 512;
  int starts = 240;            // multistart samples of the shooting parameter
  double tol_bvp = 1e-8;
  std::optional<double> v0_guess;  // converge from this v_bar(0) instead of scanning
  std::optional<double> d_guess;   // mass targets: starting d for the guess
};

/// Every branch found by the multistart scan, ordered by v_bar(0).
/// Throws NoSolutionFound when the scan brackets no root.
std::vector<StationaryProfile> find_stationary(const NonlinearityModel& model, double R,
                                               StationaryTarget target,
                                               const StationaryOptions& options = {});

/// One solution: the root nearest options.v0_guess when given, otherwise the
/// lowest-energy branch found by the scan.
StationaryProfile solve_stationary(const NonlinearityModel& model, double R,
                                   StationaryTarget target,
                                   const StationaryOptions& options = {});

/// The constant solution v = c, d = Xi(c) - c, evaluated on the same nodes.
StationaryProfile constant_profile(const NonlinearityModel& model, double R, double c, int M);

/// F_prim(s) = int_0^s Xi^{-1}(sigma + d) d sigma.
double pohozaev_primitive(const NonlinearityModel& model, double d, double s);

struct PohozaevTerms {
  double gradient = 0.0;  // pi (r v_r)^2
  double potential = 0.0; // -pi r^2 v^2
  double primitive = 0.0; // 2 pi r^2 F_prim(v)
  double interior = 0.0;  // 2 int_B F_prim(v) - int_B v^2
  double residual = 0.0;  // sum of the first three minus interior
  double scale() const;   // 1 + the largest term magnitude
};

PohozaevTerms pohozaev_terms(const StationaryProfile& profile, const NonlinearityModel& model,
                             double r);
/// Absolute residual of the identity at radius r.
double pohozaev_residual(const StationaryProfile& profile, const NonlinearityModel& model,
                         double r);

// Concentrating test sequence on the disc of radius R:
//   z_k = ln(eps^2 / (eps^2 + pi r^2)^2) - mean,  eps = 1/k.
double struwe_mean(double k, double R);
double struwe_profile(double r, double k, double R);

/// -m/(1+gamma) ln int e^z + 1/2 int |grad z|^2 + 1/2 int z^2 evaluated on
/// z = z_k^+ by log-graded radial quadrature with quad_points nodes per
/// decade. Throws NumericsError when doubling the nodes moves the value by
/// more than 1%.
double struwe_energy(double gamma, double m, double R, int k, int quad_points = 64);

/// Liapunov energy of (u_k, v_k) with v_k = (1+gamma) z_k^+ and
/// u_k + 1 = (m + |Omega|) e^{z_k^+} / int e^{z_k^+}; where that expression
/// is negative u_k is clipped to zero and rescaled to mass m.
double lifted_energy(double gamma, double m, double R, int k, int quad_points = 64);
/// Mass of the clipped lifted density (equals m up to quadrature error).
double lifted_mass(double gamma, double m, double R, int k, int quad_points = 64);

struct StruweResult {
  double gamma = 1.0;
  double m = 0.0;
  double R = 1.0;
  std::vector<int> k_values;
  std::vector<double> F_values;      // struwe_energy per k
  std::vector<double> lifted_values; // lifted_energy per k
  double fitted_slope = 0.0;         // least squares of F against ln k
  double predicted_slope = 0.0;      // 16 pi - 2 m / (1 + gamma)
};

StruweResult struwe_sweep(double gamma, double m, double R, const std::vector<int>& k_values,
                          int quad_points = 64);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

std::string profile_csv(const StationaryProfile& profile);
std::string profile_json(const StationaryProfile& profile);
std::string struwe_csv(const StruweResult& result);

}  // namespace chemolab

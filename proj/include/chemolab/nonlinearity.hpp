#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>

namespace chemolab {

struct Tolerances {
  // Absolute quadrature tolerance, scaled by max(1, |value|) for large values.
  static constexpr double quad = 1e-10;
  // Root tolerance for inverting Xi, scaled the same way.
  static constexpr double root = 1e-12;
};

/// A scalar function of s > 0 with a primary evaluator (closed form when one
/// is known) and an independent adaptive-quadrature evaluator.
class ScalarCurve {
 public:
  using Fn = std::function<double(double)>;

  ScalarCurve() = default;
  ScalarCurve(Fn primary, Fn quadrature, bool closed_form)
      : primary_(std::move(primary)), quadrature_(std::move(quadrature)),
        closed_form_(closed_form) {}

  double operator()(double s) const { return primary_(s); }
  double quadrature(double s) const { return quadrature_(s); }
  bool has_closed_form() const { return closed_form_; }

 private:
  Fn primary_;
  Fn quadrature_;
  bool closed_form_ = false;
};

enum class ModelKind { PowerType, VolumeFilling, Custom };

/// User-supplied diffusion/sensitivity pair. Optional closed forms replace
/// the quadrature fallback for the named primitive when present.
struct CustomFunctions {
  std::function<double(double)> phi;
  std::function<double(double)> psi;
  std::function<double(double)> kirchhoff;  // int_0^s phi
  std::function<double(double)> H;          // int_0^s sigma phi/psi
  std::function<double(double)> Xi;         // primitive of phi/psi
  std::string label = "custom";
};

/// phi, psi, beta and the Kirchhoff primitive evaluated at one point.
struct PointValues {
  double phi;
  double psi;
  double beta;
  double kirchhoff;
};

/// Diffusion/sensitivity family (phi, psi) with the derived curves
/// G (double primitive of phi/psi from s0), H, Xi and the Kirchhoff
/// transform. Immutable and cheap to copy.
class NonlinearityModel {
 public:
  static NonlinearityModel power_type(double p, double q, double s0 = 1.0);
  static NonlinearityModel volume_filling(double gamma, double s0 = 1.0);
  static NonlinearityModel custom(CustomFunctions fns, double s0 = 1.0);

  ModelKind kind() const { return kind_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double gamma() const { return gamma_; }
  double s0() const { return s0_; }
  std::string name() const;

  double phi(double s) const;
  double psi(double s) const;
  // psi(s)/s, extended continuously to s = 0.
  double beta(double s) const;
  // Phi(s) = int_0^s phi; the quasilinear diffusion is the Laplacian of Phi(u).
  double kirchhoff(double s) const;
  PointValues point(double s) const;

  double G(double s) const { return curves_->G(s); }
  double H(double s) const { return curves_->H(s); }
  double Xi(double s) const { return curves_->Xi(s); }
  // G'(s) = Xi(s) - Xi(s0).
  double G_prime(double s) const { return Xi(s) - xi_s0_; }
  double Xi_inverse(double y) const;

  const ScalarCurve& G_curve() const { return curves_->G; }
  const ScalarCurve& H_curve() const { return curves_->H; }
  const ScalarCurve& Xi_curve() const { return curves_->Xi; }
  const ScalarCurve& kirchhoff_curve() const { return curves_->Phi; }

  // Coefficient c0 = phi(0)/beta(0) of the logarithmic singularity of Xi at 0.
  double xi_log_coefficient() const { return c0_; }

 private:
  struct Curves {
    ScalarCurve G, H, Xi, Phi;
  };

  NonlinearityModel() = default;
  void build_curves();

  ModelKind kind_ = ModelKind::PowerType;
  double p_ = 0.0, q_ = 1.0, gamma_ = 0.0, s0_ = 1.0;
  double c0_ = 1.0, xi_s0_ = 0.0, beta0_ = 1.0;
  std::shared_ptr<const CustomFunctions> custom_;
  std::shared_ptr<const Curves> curves_;
};

// Validated entry points. Throw ModelViolation / NumericsError as documented.
double eval_phi(const NonlinearityModel& model, double s);
double eval_psi(const NonlinearityModel& model, double s);
double eval_G(const NonlinearityModel& model, double s);
double eval_H(const NonlinearityModel& model, double s);
double eval_Xi(const NonlinearityModel& model, double s);
double invert_Xi(const NonlinearityModel& model, double y);

/// Adaptive Gauss-Kronrod integral of f over [a, b], split into decades when
/// the interval spans several orders of magnitude. Throws NumericsError when
/// the error estimate exceeds tol * max(1, |I|).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = Tolerances::quad);

}  // namespace chemolab

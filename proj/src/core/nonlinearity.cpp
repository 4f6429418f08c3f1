#include "chemolab/nonlinearity.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "chemolab/errors.hpp"

namespace chemolab {

namespace {

constexpr double kBetaStep = 1e-6;

bool near_integer(double a, double& rounded) {
  rounded = std::round(a);
  return std::abs(a - rounded) < 1e-12 && std::abs(rounded) <= 64;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

// Xi(s) for phi/beta = (1+s)^a with integer a, normalized as
// ln s + int_0^s ((1+t)^a - 1)/t dt.
double power_xi_integer(int a, double s) {
  double value = std::log(s);
  if (a >= 0) {
    double sj = 1.0;
    for (int j = 1; j <= a; ++j) {
      sj *= s;
      value += binomial(a, j) * sj / j;
    }
  } else {
    const int k = -a;
    const double l1 = std::log1p(s);
    value -= l1;
    for (int j = 2; j <= k; ++j) value += std::expm1((1 - j) * l1) / (j - 1);
  }
  return value;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, tol);

  // Integrands from 0 are split at decades from 1e-6 upwards, so the kinks
  // of the near-zero regularisations (at kBetaStep and 1e-5) sit on edges.
  std::vector<double> breaks{a};
  if (a >= 0.0) {
    double x = a > 0.0 ? a : 1e-6;
    if (a == 0.0 && x < b) breaks.push_back(x);
    while (x * 10.0 < b) {
      x *= 10.0;
      breaks.push_back(x);
    }
  }
  breaks.push_back(b);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    // The acceptance test is absolute, while Gauss-Kronrod takes a tolerance
    // relative to the L1 norm of the piece. Tiny pieces asked for a relative
    // accuracy below their rounding floor recurse uselessly (and the summed
    // estimate of a noisy integrand grows with depth), so a single panel is
    // tried first and recursion targets the absolute budget.
    double err = 0.0;
    double l1 = 0.0;
    double piece = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, breaks[i], breaks[i + 1], 0, 0.0, &err, &l1);
    const double budget = 0.1 * tol * std::max(1.0, std::abs(piece));
    if (std::isfinite(piece) && err > budget) {
      const double rel = std::clamp(budget / std::max(l1, 1e-300), 1e-14, 1e-6);
      piece = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          f, breaks[i], breaks[i + 1], 15, rel, &err, &l1);
    }
    if (!std::isfinite(piece) || err > tol * std::max(1.0, std::abs(piece))) {
      std::ostringstream msg;
      msg << "quadrature did not converge on [" << breaks[i] << ", " << breaks[i + 1]
          << "]: error estimate " << err;
      throw NumericsError(msg.str());
    }
    total += piece;
  }
  return total;
}

NonlinearityModel NonlinearityModel::power_type(double p, double q, double s0) {
  NonlinearityModel m;
  m.kind_ = ModelKind::PowerType;
  m.p_ = p;
  m.q_ = q;
  m.s0_ = s0;
  m.build_curves();
  return m;
}

NonlinearityModel NonlinearityModel::volume_filling(double gamma, double s0) {
  if (!(gamma > 0.0)) throw ModelViolation("volume-filling model requires gamma > 0");
  NonlinearityModel m;
  m.kind_ = ModelKind::VolumeFilling;
  m.gamma_ = gamma;
  m.s0_ = s0;
  m.build_curves();
  return m;
}

NonlinearityModel NonlinearityModel::custom(CustomFunctions fns, double s0) {
  if (!fns.phi || !fns.psi) throw ModelViolation("custom model needs phi and psi");
  NonlinearityModel m;
  m.kind_ = ModelKind::Custom;
  m.s0_ = s0;
  m.custom_ = std::make_shared<const CustomFunctions>(std::move(fns));
  m.build_curves();
  return m;
}

std::string NonlinearityModel::name() const {
  std::ostringstream os;
  switch (kind_) {
    case ModelKind::PowerType:
      os << "power(p=" << p_ << ",q=" << q_ << ")";
      break;
    case ModelKind::VolumeFilling:
      os << "volume_filling(gamma=" << gamma_ << ")";
      break;
    case ModelKind::Custom:
      os << custom_->label;
      break;
  }
  return os.str();
}

double NonlinearityModel::phi(double s) const {
  switch (kind_) {
    case ModelKind::PowerType:
      return std::exp(-p_ * std::log1p(s));
    case ModelKind::VolumeFilling: {
      const double w = 1.0 + s;
      const double wg = std::exp(-gamma_ * std::log1p(s));
      return (1.0 + gamma_) * wg - gamma_ * wg / w;
    }
    case ModelKind::Custom:
      return custom_->phi(s);
  }
  return 0.0;
}

double NonlinearityModel::psi(double s) const {
  switch (kind_) {
    case ModelKind::PowerType:
      return s * std::exp((q_ - 1.0) * std::log1p(s));
    case ModelKind::VolumeFilling:
      return s * std::exp(-gamma_ * std::log1p(s));
    case ModelKind::Custom:
      return custom_->psi(s);
  }
  return 0.0;
}

double NonlinearityModel::beta(double s) const {
  switch (kind_) {
    case ModelKind::PowerType:
      return std::exp((q_ - 1.0) * std::log1p(s));
    case ModelKind::VolumeFilling:
      return std::exp(-gamma_ * std::log1p(s));
    case ModelKind::Custom:
      if (s >= kBetaStep) return custom_->psi(s) / s;
      {
        const double bh = custom_->psi(kBetaStep) / kBetaStep;
        return beta0_ + (bh - beta0_) * (s / kBetaStep);
      }
  }
  return 0.0;
}

double NonlinearityModel::kirchhoff(double s) const {
  switch (kind_) {
    case ModelKind::PowerType:
      if (p_ == 1.0) return std::log1p(s);
      return std::expm1((1.0 - p_) * std::log1p(s)) / (1.0 - p_);
    case ModelKind::VolumeFilling: {
      const double l1 = std::log1p(s);
      if (gamma_ == 1.0) return 2.0 * l1 - s / (1.0 + s);
      return (1.0 + gamma_) * std::expm1((1.0 - gamma_) * l1) / (1.0 - gamma_) +
             std::expm1(-gamma_ * l1);
    }
    case ModelKind::Custom:
      return curves_->Phi(s);
  }
  return 0.0;
}

PointValues NonlinearityModel::point(double s) const {
  switch (kind_) {
    case ModelKind::VolumeFilling: {
      const double l1 = std::log1p(s);
      const double w = 1.0 + s;
      // the common gamma = 1 case avoids an exp on the hot path
      const double wg = gamma_ == 1.0 ? 1.0 / w : std::exp(-gamma_ * l1);
      PointValues v;
      v.beta = wg;
      v.psi = s * wg;
      v.phi = (1.0 + gamma_) * wg - gamma_ * wg / w;
      if (gamma_ == 1.0) {
        v.kirchhoff = 2.0 * l1 - s / w;
      } else {
        v.kirchhoff = (1.0 + gamma_) * (w * wg - 1.0) / (1.0 - gamma_) + (wg - 1.0);
      }
      return v;
    }
    case ModelKind::PowerType: {
      const double l1 = std::log1p(s);
      PointValues v;
      v.phi = std::exp(-p_ * l1);
      v.beta = std::exp((q_ - 1.0) * l1);
      v.psi = s * v.beta;
      v.kirchhoff = p_ == 1.0 ? l1 : std::expm1((1.0 - p_) * l1) / (1.0 - p_);
      return v;
    }
    case ModelKind::Custom:
      break;
  }
  return PointValues{phi(s), psi(s), beta(s), kirchhoff(s)};
}

void NonlinearityModel::build_curves() {
  if (kind_ == ModelKind::Custom) {
    const double bh = custom_->psi(kBetaStep) / kBetaStep;
    const double b2h = custom_->psi(2.0 * kBetaStep) / (2.0 * kBetaStep);
    beta0_ = 2.0 * bh - b2h;
  } else {
    beta0_ = 1.0;
  }
  // Copies of the scalar description so the curves never reference *this.
  NonlinearityModel self = *this;
  self.curves_.reset();

  const auto phi_over_beta = [self](double t) { return self.phi(t) / self.beta(t); };
  c0_ = phi_over_beta(0.0);
  const double c0 = c0_;
  const double s0 = s0_;

  auto curves = std::make_shared<Curves>();

  // Kirchhoff transform.
  const auto phi_fn = [self](double t) { return self.phi(t); };
  ScalarCurve::Fn phi_quad = [phi_fn](double s) { return integrate(phi_fn, 0.0, s); };
  if (kind_ == ModelKind::Custom) {
    if (custom_->kirchhoff) {
      curves->Phi = ScalarCurve(custom_->kirchhoff, phi_quad, true);
    } else {
      curves->Phi = ScalarCurve(phi_quad, phi_quad, false);
    }
  } else {
    curves->Phi = ScalarCurve([self](double s) { return self.kirchhoff(s); }, phi_quad, true);
  }

  // Without chemotactic sensitivity near 0 (e.g. psi == 0, pure diffusion)
  // phi/psi has no logarithmic primitive; G, H and Xi are then undefined.
  if (!(std::isfinite(c0) && c0 > 0.0)) {
    const ScalarCurve::Fn undefined = [](double) -> double {
      throw ModelViolation("G, H and Xi are undefined: phi/psi is not integrable at 0");
    };
    curves->G = curves->H = curves->Xi = ScalarCurve(undefined, undefined, false);
    xi_s0_ = std::numeric_limits<double>::quiet_NaN();
    curves_ = curves;
    return;
  }

  // H(s) = int_0^s sigma phi/psi = int_0^s phi/beta.
  ScalarCurve::Fn h_quad = [phi_over_beta](double s) {
    return integrate(phi_over_beta, 0.0, s);
  };
  switch (kind_) {
    case ModelKind::PowerType: {
      const double e = 2.0 - p_ - q_;
      curves->H = ScalarCurve(
          [e](double s) {
            return e == 0.0 ? std::log1p(s) : std::expm1(e * std::log1p(s)) / e;
          },
          h_quad, true);
      break;
    }
    case ModelKind::VolumeFilling: {
      const double g = gamma_;
      curves->H = ScalarCurve(
          [g](double s) { return (1.0 + g) * s - g * std::log1p(s); }, h_quad, true);
      break;
    }
    case ModelKind::Custom:
      curves->H = custom_->H ? ScalarCurve(custom_->H, h_quad, true)
                             : ScalarCurve(h_quad, h_quad, false);
      break;
  }

  // Xi(s) = c0 ln s + int_0^s (phi/beta - c0)/t dt.
  // For the power type phi/beta = (1+t)^a and expm1 avoids the cancellation
  // in (phi/beta - c0)/t near t = 0.
  std::function<double(double)> regular;
  if (kind_ == ModelKind::PowerType) {
    const double a = 1.0 - p_ - q_;
    regular = [a](double t) { return t == 0.0 ? a : std::expm1(a * std::log1p(t)) / t; };
  } else {
    // Below tau the difference quotient is mostly rounding noise; extrapolate
    // linearly from [tau, 2 tau] instead (error O(tau^2)).
    constexpr double tau = 1e-5;
    const auto quotient = [phi_over_beta, c0](double t) { return (phi_over_beta(t) - c0) / t; };
    const double r1 = quotient(tau);
    const double r2 = quotient(2.0 * tau);
    regular = [quotient, r1, r2](double t) {
      return t < tau ? r1 + (r2 - r1) * (t - tau) / tau : quotient(t);
    };
  }
  ScalarCurve::Fn xi_quad = [regular, c0](double s) {
    return c0 * std::log(s) + integrate(regular, 0.0, s);
  };
  bool xi_closed = true;
  switch (kind_) {
    case ModelKind::PowerType: {
      double a = 0.0;
      if (near_integer(1.0 - p_ - q_, a)) {
        const int ai = static_cast<int>(a);
        curves->Xi = ScalarCurve([ai](double s) { return power_xi_integer(ai, s); }, xi_quad, true);
      } else {
        curves->Xi = ScalarCurve(xi_quad, xi_quad, false);
        xi_closed = false;
      }
      break;
    }
    case ModelKind::VolumeFilling: {
      const double g = gamma_;
      curves->Xi = ScalarCurve([g](double s) { return std::log(s) + g * std::log1p(s); }, xi_quad,
                               true);
      break;
    }
    case ModelKind::Custom:
      if (custom_->Xi) {
        curves->Xi = ScalarCurve(custom_->Xi, xi_quad, true);
      } else {
        curves->Xi = ScalarCurve(xi_quad, xi_quad, false);
        xi_closed = false;
      }
      break;
  }

  // G via the Cauchy formula int_{s0}^s (s - t) phi/psi dt as the independent route.
  ScalarCurve::Fn g_quad = [phi_over_beta, s0](double s) {
    const auto kernel = [phi_over_beta, s](double t) { return (s - t) / t * phi_over_beta(t); };
    return integrate(kernel, s0, s);
  };
  const ScalarCurve xi_curve = curves->Xi;
  const ScalarCurve h_curve = curves->H;
  const double xi_s0 = xi_curve(s0);
  const double h_s0 = h_curve(s0);
  xi_s0_ = xi_s0;
  // Integration by parts: G(s) = s (Xi(s) - Xi(s0)) - (H(s) - H(s0)).
  ScalarCurve::Fn g_reduced = [xi_curve, h_curve, xi_s0, h_s0](double s) {
    if (s == 0.0) return h_s0 - h_curve(0.0);
    return s * (xi_curve(s) - xi_s0) - (h_curve(s) - h_s0);
  };
  if (kind_ == ModelKind::VolumeFilling && s0 == 1.0) {
    const double g = gamma_;
    const double ln2 = std::log(2.0);
    curves->G = ScalarCurve(
        [g, ln2](double u) {
          const double ulnu = u > 0.0 ? u * std::log(u) : 0.0;
          return g * (1.0 + u) * std::log1p(u) + ulnu - u * (g * (1.0 + ln2) + 1.0) -
                 g * ln2 + g + 1.0;
        },
        g_quad, true);
  } else {
    curves->G = ScalarCurve(g_reduced, g_quad, xi_closed && h_curve.has_closed_form());
  }

  curves_ = curves;
}

double NonlinearityModel::Xi_inverse(double y) const {
  // Work in t = ln s, where Xi is smooth with slope phi/beta > 0.
  const auto f = [this, y](double t) { return Xi(std::exp(t)) - y; };
  const double tol = Tolerances::root * std::max(1.0, std::abs(y));

  double lo = 0.0, hi = 0.0;
  double flo = 0.0, fhi = 0.0;
  double t = 0.0;
  double ft = f(t);
  if (std::abs(ft) <= tol) return 1.0;
  if (ft < 0.0) {
    lo = t;
    flo = ft;
    double step = 1.0;
    for (;;) {
      hi = lo + step;
      if (hi > 690.0) throw NumericsError("invert_Xi: value above the range of Xi");
      fhi = f(hi);
      if (fhi >= 0.0) break;
      lo = hi;
      flo = fhi;
      step *= 2.0;
    }
  } else {
    hi = t;
    fhi = ft;
    double step = 1.0;
    for (;;) {
      lo = hi - step;
      if (lo < -700.0) throw NumericsError("invert_Xi: value below the range of Xi");
      flo = f(lo);
      if (flo <= 0.0) break;
      hi = lo;
      fhi = flo;
      step *= 2.0;
    }
  }
  if (flo == 0.0) return std::exp(lo);
  if (fhi == 0.0) return std::exp(hi);

  t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    ft = f(t);
    if (std::abs(ft) <= tol) return std::exp(t);
    if (ft < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    const double s = std::exp(t);
    const double slope = phi(s) / beta(s);
    double next = t - ft / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      return std::exp(t);
    }
    t = next;
  }
  throw NumericsError("invert_Xi: root iteration did not converge");
}

double eval_phi(const NonlinearityModel& model, double s) {
  if (!(s >= 0.0)) throw ModelViolation("phi evaluated at negative argument");
  const double v = model.phi(s);
  if (!(v > 0.0)) {
    std::ostringstream msg;
    msg << model.name() << ": phi(" << s << ") = " << v << " is not positive";
    throw ModelViolation(msg.str());
  }
  return v;
}

double eval_psi(const NonlinearityModel& model, double s) {
  if (!(s >= 0.0)) throw ModelViolation("psi evaluated at negative argument");
  if (s == 0.0) return 0.0;
  const double v = model.psi(s);
  if (!(v >= 0.0)) {
    std::ostringstream msg;
    msg << model.name() << ": psi(" << s << ") = " << v << " is negative";
    throw ModelViolation(msg.str());
  }
  return v;
}

double eval_G(const NonlinearityModel& model, double s) {
  if (!(s > 0.0)) throw ModelViolation("G requires s > 0");
  return model.G(s);
}

double eval_H(const NonlinearityModel& model, double s) {
  if (!(s >= 0.0)) throw ModelViolation("H requires s >= 0");
  if (s == 0.0) return 0.0;
  return model.H(s);
}

double eval_Xi(const NonlinearityModel& model, double s) {
  if (!(s > 0.0)) throw ModelViolation("Xi requires s > 0");
  return model.Xi(s);
}

double invert_Xi(const NonlinearityModel& model, double y) {
  if (!std::isfinite(y)) throw NumericsError("invert_Xi: non-finite argument");
  return model.Xi_inverse(y);
}

}  // namespace chemolab

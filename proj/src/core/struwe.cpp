#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "chemolab/errors.hpp"
#include "chemolab/stationary.hpp"

namespace chemolab {

namespace {

constexpr double kPi = std::numbers::pi;

using RadialFn = std::function<double(double)>;

double gauss_panel(const RadialFn& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

// Integral over [a, b] with geometric panels: nodes_per_decade/20 panels per
// decade, starting from r_floor when a = 0 (the first panel covers [0, r_floor]).
double graded_integral(const RadialFn& f, double a, double b, double r_floor,
                       int nodes_per_decade) {
  if (!(b > a)) return 0.0;
  const int per_decade = std::max(1, (nodes_per_decade + 19) / 20);
  const double ratio = std::pow(10.0, 1.0 / per_decade);
  double sum = 0.0;
  double lo = a;
  if (lo < r_floor) {
    const double hi = std::min(r_floor, b);
    sum += gauss_panel(f, lo, hi);
    lo = hi;
  }
  while (lo < b) {
    const double hi = std::min(lo * ratio, b);
    sum += gauss_panel(f, lo, hi);
    lo = hi;
  }
  return sum;
}

double piecewise_integral(const RadialFn& f, std::vector<double> breaks, double r_floor,
                          int nodes_per_decade) {
  std::sort(breaks.begin(), breaks.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    sum += graded_integral(f, breaks[i], breaks[i + 1], r_floor, nodes_per_decade);
  return sum;
}

// Radius where z_k equals level (z_k is decreasing in r); clamped to [0, R].
double level_radius(double k, double R, double level) {
  const double e2 = 1.0 / (k * k);
  const double mean = struwe_mean(k, R);
  // (e2 + S)^2 = e2 exp(-mean - level)
  const double S = std::sqrt(e2) * std::exp(-0.5 * (mean + level)) - e2;
  if (S <= 0.0) return 0.0;
  return std::min(R, std::sqrt(S / kPi));
}

struct ZIntegrals {
  double exp_int = 0.0;   // int e^{z+}
  double grad = 0.0;      // int |grad z+|^2
  double square = 0.0;    // int (z+)^2
  double r_c = 0.0;
};

ZIntegrals z_integrals(double k, double R, int nodes) {
  const double e2 = 1.0 / (k * k);
  const double r_c = level_radius(k, R, 0.0);
  const double floor_r = 1e-2 / k;
  const auto z = [&](double r) { return struwe_profile(r, k, R); };
  ZIntegrals out;
  out.r_c = r_c;
  out.exp_int = piecewise_integral([&](double r) { return 2 * kPi * r * std::exp(z(r)); },
                                   {0.0, r_c}, floor_r, nodes) +
                kPi * (R * R - r_c * r_c);
  out.grad = piecewise_integral(
      [&](double r) {
        const double zr = -4.0 * kPi * r / (e2 + kPi * r * r);
        return 2 * kPi * r * zr * zr;
      },
      {0.0, r_c}, floor_r, nodes);
  out.square = piecewise_integral(
      [&](double r) {
        const double zz = z(r);
        return 2 * kPi * r * zz * zz;
      },
      {0.0, r_c}, floor_r, nodes);
  return out;
}

double struwe_value(double gamma, double m, double R, int k, int nodes) {
  const ZIntegrals zi = z_integrals(k, R, nodes);
  return -m / (1.0 + gamma) * std::log(zi.exp_int) + 0.5 * zi.grad + 0.5 * zi.square;
}

struct Lifted {
  double energy = 0.0;
  double mass = 0.0;
};

Lifted lifted_value(double gamma, double m, double R, int k, int nodes) {
  const double area = kPi * R * R;
  const ZIntegrals zi = z_integrals(k, R, nodes);
  const double A = (m + area) / zi.exp_int;
  const double floor_r = 1e-2 / k;
  const auto zplus = [&](double r) { return std::max(0.0, struwe_profile(r, k, R)); };
  const auto raw = [&](double r) { return std::max(0.0, A * std::exp(zplus(r)) - 1.0); };
  // the clipped density vanishes beyond r_star when A < 1
  const double r_star = A < 1.0 ? level_radius(k, R, -std::log(A)) : R;
  std::vector<double> breaks{0.0, zi.r_c, r_star, R};

  const double raw_mass =
      piecewise_integral([&](double r) { return 2 * kPi * r * raw(r); }, breaks, floor_r, nodes);
  if (!(raw_mass > 0.0)) throw NumericsError("lifted_energy: lifted density vanishes");
  const double scale = m / raw_mass;
  const auto u = [&](double r) { return scale * raw(r); };

  const NonlinearityModel model = NonlinearityModel::volume_filling(gamma);
  const double g1 = 1.0 + gamma;
  Lifted out;
  out.mass = piecewise_integral([&](double r) { return 2 * kPi * r * u(r); }, breaks, floor_r,
                                nodes);
  const double coupling = piecewise_integral(
      [&](double r) { return 2 * kPi * r * u(r) * g1 * zplus(r); }, breaks, floor_r, nodes);
  const double entropy_part = piecewise_integral(
      [&](double r) { return 2 * kPi * r * model.G(std::max(u(r), 1e-30)); }, breaks, floor_r,
      nodes);
  out.energy = 0.5 * g1 * g1 * (zi.grad + zi.square) - coupling + entropy_part;
  return out;
}

void check_doubling(double coarse, double fine, const char* what) {
  if (std::abs(coarse - fine) > 0.01 * std::max(std::abs(fine), 1.0)) {
    std::ostringstream msg;
    msg << what << ": quadrature under-resolved (" << coarse << " vs " << fine << ")";
    throw NumericsError(msg.str());
  }
}

void check_args(double gamma, double m, double R, int k, int quad_points) {
  if (!(gamma > 0.0)) throw ConfigError("struwe: gamma must be positive");
  if (!(m > 0.0)) throw ConfigError("struwe: mass must be positive");
  if (!(R > 0.0)) throw ConfigError("struwe: radius must be positive");
  if (k < 1) throw ConfigError("struwe: k must be >= 1");
  if (quad_points < 1) throw ConfigError("struwe: quad_points must be positive");
}

}  // namespace

double struwe_mean(double k, double R) {
  const double e2 = 1.0 / (k * k);
  const double S = kPi * R * R;
  const double w = e2 + S;
  const double log_part = (w * std::log(w) - w) - (e2 * std::log(e2) - e2);
  return (S * std::log(e2) - 2.0 * log_part) / S;
}

double struwe_profile(double r, double k, double R) {
  const double e2 = 1.0 / (k * k);
  const double w = e2 + kPi * r * r;
  return std::log(e2) - 2.0 * std::log(w) - struwe_mean(k, R);
}

double struwe_energy(double gamma, double m, double R, int k, int quad_points) {
  check_args(gamma, m, R, k, quad_points);
  const double coarse = struwe_value(gamma, m, R, k, quad_points);
  const double fine = struwe_value(gamma, m, R, k, 2 * quad_points);
  check_doubling(coarse, fine, "struwe_energy");
  return fine;
}

double lifted_energy(double gamma, double m, double R, int k, int quad_points) {
  check_args(gamma, m, R, k, quad_points);
  const double coarse = lifted_value(gamma, m, R, k, quad_points).energy;
  const double fine = lifted_value(gamma, m, R, k, 2 * quad_points).energy;
  check_doubling(coarse, fine, "lifted_energy");
  return fine;
}

double lifted_mass(double gamma, double m, double R, int k, int quad_points) {
  check_args(gamma, m, R, k, quad_points);
  return lifted_value(gamma, m, R, k, 2 * quad_points).mass;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ConfigError("least_squares_slope: need two or more paired samples");
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("least_squares_slope: degenerate abscissae");
  return sxy / sxx;
}

StruweResult struwe_sweep(double gamma, double m, double R, const std::vector<int>& k_values,
                          int quad_points) {
  StruweResult res;
  res.gamma = gamma;
  res.m = m;
  res.R = R;
  res.k_values = k_values;
  res.predicted_slope = 16.0 * kPi - 2.0 * m / (1.0 + gamma);
  std::vector<double> logk;
  for (int k : k_values) {
    res.F_values.push_back(struwe_energy(gamma, m, R, k, quad_points));
    res.lifted_values.push_back(lifted_energy(gamma, m, R, k, quad_points));
    logk.push_back(std::log(double(k)));
  }
  res.fitted_slope = least_squares_slope(logk, res.F_values);
  return res;
}

std::string struwe_csv(const StruweResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "k,F_zk,F_lifted\n";
  for (std::size_t i = 0; i < result.k_values.size(); ++i)
    out << result.k_values[i] << ',' << result.F_values[i] << ',' << result.lifted_values[i]
        << '\n';
  return out.str();
}

}  // namespace chemolab

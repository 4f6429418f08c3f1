#include "chemolab/stationary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include "json.hpp"

#include "chemolab/errors.hpp"

namespace chemolab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Augmented state: v, w = r v', then 2 pi r-weighted integrals of
// u, G(u), u v, v'^2, v^2, v.
constexpr int kLight = 2;
constexpr int kFull = 8;
using State = std::array<double, kFull>;

struct Shooter {
  const NonlinearityModel& model;
  double R;
  int M;
  double d;

  double h() const { return R / (2.0 * M); }

  template <int N>
  void rhs(double r, const State& y, State& dy) const {
    const double v = y[0], w = y[1];
    const double u = model.Xi_inverse(v + d);
    dy[0] = w / r;
    dy[1] = r * (v - u);
    if constexpr (N == kFull) {
      const double tw = 2.0 * kPi * r;
      const double vr = w / r;
      dy[2] = tw * u;
      dy[3] = tw * model.G(std::max(u, 1e-300));
      dy[4] = tw * u * v;
      dy[5] = tw * vr * vr;
      dy[6] = tw * v * v;
      dy[7] = tw * v;
    }
  }

  // Series start at r = h: v = v0 + f0 r^2/4, w = f0 r^2/2, f0 = v0 - u0.
  template <int N>
  State start(double v0) const {
    State y{};
    const double hh = h();
    const double u0 = model.Xi_inverse(v0 + d);
    const double f0 = v0 - u0;
    y[0] = v0 + 0.25 * f0 * hh * hh;
    y[1] = 0.5 * f0 * hh * hh;
    if constexpr (N == kFull) {
      const double disc = kPi * hh * hh;
      y[2] = disc * u0;
      y[3] = disc * model.G(std::max(u0, 1e-300));
      y[4] = disc * u0 * v0;
      y[5] = 0.0;
      y[6] = disc * v0 * v0;
      y[7] = disc * v0;
    }
    return y;
  }

  // Integrates to R; returns false on overflow. Optional node capture.
  template <int N>
  bool integrate(double v0, State& y, std::vector<double>* vs = nullptr,
                 std::vector<double>* dvs = nullptr) const {
    const double hh = h();
    const int steps = 2 * M;
    y = start<N>(v0);
    if (vs) {
      vs->assign(steps + 1, 0.0);
      dvs->assign(steps + 1, 0.0);
      (*vs)[0] = v0;
      (*dvs)[0] = 0.0;
      (*vs)[1] = y[0];
      (*dvs)[1] = y[1] / hh;
    }
    State k1{}, k2{}, k3{}, k4{}, tmp{};
    for (int j = 1; j < steps; ++j) {
      const double r = j * hh;
      rhs<N>(r, y, k1);
      for (int i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * hh * k1[i];
      rhs<N>(r + 0.5 * hh, tmp, k2);
      for (int i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * hh * k2[i];
      rhs<N>(r + 0.5 * hh, tmp, k3);
      for (int i = 0; i < N; ++i) tmp[i] = y[i] + hh * k3[i];
      rhs<N>(r + hh, tmp, k4);
      for (int i = 0; i < N; ++i) y[i] += hh / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || std::abs(y[0]) > 1e6) return false;
      if (vs) {
        (*vs)[j + 1] = y[0];
        (*dvs)[j + 1] = y[1] / (r + hh);
      }
    }
    return true;
  }

  // Shooting map v'(R) as a function of v(0); NaN when the shot diverges.
  double residual(double v0) const {
    State y;
    try {
      if (!integrate<kLight>(v0, y)) return kNaN;
    } catch (const NumericsError&) {
      return kNaN;
    }
    return y[1] / R;
  }
};

RadialGrid disc_grid(double R, int M) { return build_grid(2, R, M); }

StationaryProfile assemble(const NonlinearityModel& model, double R, int M, double d, double v0) {
  Shooter sh{model, R, M, d};
  State y;
  StationaryProfile p;
  if (!sh.integrate<kFull>(v0, y, &p.v_nodes, &p.dv_nodes))
    throw NumericsError("stationary: profile diverged while assembling");
  p.grid = disc_grid(R, M);
  const double hh = sh.h();
  p.r_nodes.resize(2 * M + 1);
  for (int j = 0; j <= 2 * M; ++j) p.r_nodes[j] = j * hh;
  p.v_bar.resize(M);
  p.u_bar.resize(M);
  for (int i = 0; i < M; ++i) {
    p.v_bar[i] = p.v_nodes[2 * i + 1];
    p.u_bar[i] = model.Xi_inverse(p.v_bar[i] + d);
  }
  p.d = d;
  p.shoot_v0 = v0;
  p.m = y[2];
  p.mass_v = y[7];
  p.F_value = 0.5 * y[5] + 0.5 * y[6] - y[4] + y[3];
  p.neumann_residual = std::abs(y[1] / R);
  const PohozaevTerms t = pohozaev_terms(p, model, 0.5 * R);
  p.pohozaev_residual = std::abs(t.residual) / t.scale();
  return p;
}

// Constant levels c with Xi(c) - c = d, found on a log grid and refined.
std::vector<double> constant_levels(const NonlinearityModel& model, double d) {
  std::vector<double> out;
  const auto g = [&](double c) { return model.Xi(c) - c - d; };
  const int N = 400;
  double prev_c = 1e-8, prev_g = g(prev_c);
  for (int i = 1; i <= N; ++i) {
    const double c = std::pow(10.0, -8.0 + 16.0 * i / N);
    const double gc = g(c);
    if (std::isfinite(prev_g) && std::isfinite(gc) && (prev_g == 0.0 || prev_g * gc < 0.0)) {
      boost::uintmax_t it = 200;
      const auto root = boost::math::tools::toms748_solve(
          g, prev_c, c, boost::math::tools::eps_tolerance<double>(52), it);
      out.push_back(0.5 * (root.first + root.second));
    }
    prev_c = c;
    prev_g = gc;
  }
  return out;
}

double refine_root(const Shooter& sh, double a, double b, double fa, double fb) {
  boost::uintmax_t it = 200;
  const auto f = [&](double x) {
    const double r = sh.residual(x);
    if (!std::isfinite(r)) throw NumericsError("stationary: shot diverged inside bracket");
    return r;
  };
  const auto root = boost::math::tools::toms748_solve(
      f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), it);
  return 0.5 * (root.first + root.second);
}

std::vector<double> scan_grid(const std::vector<double>& constants, int starts) {
  double top = 50.0;
  for (double c : constants) top = std::max(top, 4.0 * c);
  std::vector<double> xs;
  xs.reserve(starts + 1);
  for (int i = 0; i <= starts; ++i) xs.push_back(1e-3 * std::pow(top / 1e-3, double(i) / starts));
  return xs;
}

std::vector<StationaryProfile> solve_for_d(const NonlinearityModel& model, double R, double d,
                                           const StationaryOptions& opt) {
  std::vector<StationaryProfile> found;
  const std::vector<double> consts = constant_levels(model, d);
  for (double c : consts) found.push_back(constant_profile(model, R, c, opt.M));

  Shooter sh{model, R, opt.M, d};
  const auto is_constant = [&](double v0) {
    for (double c : consts)
      if (std::abs(v0 - c) <= 1e-6 * std::max(1.0, c)) return true;
    return false;
  };
  std::vector<double> xs = scan_grid(consts, opt.starts);
  // the constants themselves are roots; keep them off the sample points
  for (double& x : xs)
    for (double c : consts)
      if (std::abs(x - c) < 1e-9 * std::max(1.0, c)) x *= 1.0 + 1e-6;
  std::vector<double> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = sh.residual(xs[i]);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!std::isfinite(fs[i]) || !std::isfinite(fs[i + 1])) continue;
    if (fs[i] * fs[i + 1] > 0.0) continue;
    double v0;
    try {
      v0 = fs[i] == 0.0 ? xs[i] : refine_root(sh, xs[i], xs[i + 1], fs[i], fs[i + 1]);
    } catch (const NumericsError&) {
      continue;
    }
    if (is_constant(v0)) continue;
    if (std::abs(sh.residual(v0)) > opt.tol_bvp) continue;
    found.push_back(assemble(model, R, opt.M, d, v0));
  }
  std::sort(found.begin(), found.end(),
            [](const StationaryProfile& a, const StationaryProfile& b) {
              return a.shoot_v0 < b.shoot_v0;
            });
  return found;
}

// Damped Newton on (v0, d) for residuals (v'(R), m(v0, d) - target).
std::optional<StationaryProfile> newton_mass(const NonlinearityModel& model, double R,
                                             double target, double v0, double d,
                                             const StationaryOptions& opt) {
  const auto eval = [&](double a, double b, std::array<double, 2>& F) {
    Shooter sh{model, R, opt.M, b};
    State y;
    try {
      if (!sh.integrate<kFull>(a, y)) return false;
    } catch (const NumericsError&) {
      return false;
    }
    F = {y[1] / R, (y[2] - target) / target};
    return true;
  };
  std::array<double, 2> F;
  if (!eval(v0, d, F)) return std::nullopt;
  for (int it = 0; it < 60; ++it) {
    const double norm = std::hypot(F[0], F[1]);
    if (std::abs(F[0]) <= 0.1 * opt.tol_bvp && std::abs(F[1]) <= 0.1 * opt.tol_bvp) break;
    const double ha = 1e-7 * std::max(1.0, std::abs(v0));
    const double hb = 1e-7 * std::max(1.0, std::abs(d));
    std::array<double, 2> Fa, Fb;
    if (!eval(v0 + ha, d, Fa) || !eval(v0, d + hb, Fb)) return std::nullopt;
    const double J00 = (Fa[0] - F[0]) / ha, J10 = (Fa[1] - F[1]) / ha;
    const double J01 = (Fb[0] - F[0]) / hb, J11 = (Fb[1] - F[1]) / hb;
    const double det = J00 * J11 - J01 * J10;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) return std::nullopt;
    const double da = -(J11 * F[0] - J01 * F[1]) / det;
    const double db = -(-J10 * F[0] + J00 * F[1]) / det;
    double lambda = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt) {
      std::array<double, 2> Fn;
      if (eval(v0 + lambda * da, d + lambda * db, Fn) && std::hypot(Fn[0], Fn[1]) < norm) {
        v0 += lambda * da;
        d += lambda * db;
        F = Fn;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  if (std::abs(F[0]) > opt.tol_bvp || std::abs(F[1]) > opt.tol_bvp) return std::nullopt;
  return assemble(model, R, opt.M, d, v0);
}

std::vector<StationaryProfile> solve_for_mass(const NonlinearityModel& model, double R,
                                              double m, const StationaryOptions& opt) {
  std::vector<StationaryProfile> found;
  const double area = kPi * R * R;
  const double c = m / area;
  found.push_back(constant_profile(model, R, c, opt.M));
  const double d_const = model.Xi(c) - c;

  if (opt.v0_guess) {
    if (auto p = newton_mass(model, R, m, *opt.v0_guess, opt.d_guess.value_or(d_const), opt))
      found.push_back(*p);
    return found;
  }
  // Track nonconstant branches across a d-scan and refine mass crossings.
  StationaryOptions coarse = opt;
  coarse.starts = std::max(60, opt.starts / 2);
  struct Sample {
    double d, v0, mass;
  };
  std::vector<std::vector<Sample>> rows;
  const int Nd = 48;
  const double d_lo = d_const - 40.0, d_hi = d_const + 10.0;
  for (int i = 0; i <= Nd; ++i) {
    const double d = d_lo + (d_hi - d_lo) * i / Nd;
    std::vector<Sample> row;
    for (const auto& p : solve_for_d(model, R, d, coarse))
      if (!p.constant) row.push_back({d, p.shoot_v0, p.m});
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = rows[i + 1];
    if (a.empty() || a.size() != b.size()) continue;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double ga = a[j].mass - m, gb = b[j].mass - m;
      if (ga * gb > 0.0) continue;
      const double w = ga / (ga - gb);
      const double v0 = a[j].v0 + w * (b[j].v0 - a[j].v0);
      const double d = a[j].d + w * (b[j].d - a[j].d);
      if (auto p = newton_mass(model, R, m, v0, d, opt)) {
        bool dup = false;
        for (const auto& q : found)
          if (std::abs(q.shoot_v0 - p->shoot_v0) < 1e-6 * std::max(1.0, q.shoot_v0)) dup = true;
        if (!dup) found.push_back(*p);
      }
    }
  }
  std::sort(found.begin(), found.end(),
            [](const StationaryProfile& a, const StationaryProfile& b) {
              return a.shoot_v0 < b.shoot_v0;
            });
  return found;
}

void check_inputs(double R, const StationaryOptions& opt) {
  if (!(R > 0.0)) throw ConfigError("stationary: radius must be positive");
  if (opt.M < 8) throw ConfigError("stationary: need at least 8 cells");
  if (opt.starts < 2) throw ConfigError("stationary: need at least two multistart samples");
  if (!(opt.tol_bvp > 0.0)) throw ConfigError("stationary: tolerance must be positive");
}

}  // namespace

double PohozaevTerms::scale() const {
  return 1.0 + std::max({std::abs(gradient), std::abs(potential), std::abs(primitive),
                         std::abs(interior)});
}

double pohozaev_primitive(const NonlinearityModel& model, double d, double s) {
  // d/ds H(Xi^{-1}(s + d)) = Xi^{-1}(s + d), since H' = s Xi'.
  return model.H(model.Xi_inverse(s + d)) - model.H(model.Xi_inverse(d));
}

StationaryProfile constant_profile(const NonlinearityModel& model, double R, double c, int M) {
  if (!(c > 0.0)) throw ConfigError("constant_profile: level must be positive");
  if (M < 8) throw ConfigError("constant_profile: need at least 8 cells");
  StationaryProfile p;
  p.grid = disc_grid(R, M);
  p.constant = true;
  p.d = model.Xi(c) - c;
  p.shoot_v0 = c;
  p.v_bar.assign(M, c);
  p.u_bar.assign(M, c);
  p.r_nodes.resize(2 * M + 1);
  for (int j = 0; j <= 2 * M; ++j) p.r_nodes[j] = j * R / (2.0 * M);
  p.v_nodes.assign(2 * M + 1, c);
  p.dv_nodes.assign(2 * M + 1, 0.0);
  const double area = kPi * R * R;
  p.m = c * area;
  p.mass_v = c * area;
  p.F_value = area * (model.G(c) - 0.5 * c * c);
  p.neumann_residual = 0.0;
  const PohozaevTerms t = pohozaev_terms(p, model, 0.5 * R);
  p.pohozaev_residual = std::abs(t.residual) / t.scale();
  return p;
}

PohozaevTerms pohozaev_terms(const StationaryProfile& p, const NonlinearityModel& model,
                             double r) {
  const double R = p.r_nodes.back();
  if (!(r > 0.0 && r <= R * (1.0 + 1e-14))) throw ConfigError("pohozaev: need 0 < r <= R");
  const std::size_t N = p.r_nodes.size() - 1;
  const double h = R / double(N);
  const auto Fp = [&](double s) { return pohozaev_primitive(model, p.d, s); };
  const auto integrand = [&](std::size_t j) {
    const double v = p.v_nodes[j];
    return 2.0 * kPi * p.r_nodes[j] * (2.0 * Fp(v) - v * v);
  };
  // cubic Hermite interpolation of v between nodes
  const auto hermite = [&](double x, double& v, double& dv) {
    std::size_t j = std::min<std::size_t>(N - 1, std::size_t(x / h));
    const double t = (x - p.r_nodes[j]) / h;
    const double v0 = p.v_nodes[j], v1 = p.v_nodes[j + 1];
    const double m0 = p.dv_nodes[j] * h, m1 = p.dv_nodes[j + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    v = (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * v1 +
        (t3 - t2) * m1;
    dv = ((6 * t2 - 6 * t) * v0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * v1 +
          (3 * t2 - 2 * t) * m1) / h;
  };

  // composite Simpson over whole node pairs, Gauss on the remainder
  std::size_t J = std::size_t(std::floor(r / h + 1e-9));
  if (J > N) J = N;
  if (J % 2 == 1) --J;
  double interior = 0.0;
  for (std::size_t j = 0; j + 2 <= J; j += 2)
    interior += h / 3.0 * (integrand(j) + 4.0 * integrand(j + 1) + integrand(j + 2));
  const double r_a = J * h;
  if (r - r_a > 1e-14 * R) {
    interior += boost::math::quadrature::gauss<double, 10>::integrate(
        [&](double x) {
          double v, dv;
          hermite(x, v, dv);
          return 2.0 * kPi * x * (2.0 * Fp(v) - v * v);
        },
        r_a, r);
  }
  double v, dv;
  const std::size_t jr = std::size_t(std::llround(r / h));
  if (std::abs(r - jr * h) <= 1e-12 * R) {
    v = p.v_nodes[jr];
    dv = p.dv_nodes[jr];
  } else {
    hermite(r, v, dv);
  }
  PohozaevTerms t;
  t.gradient = kPi * (dv * r) * (dv * r);
  t.potential = -kPi * r * r * v * v;
  t.primitive = 2.0 * kPi * r * r * Fp(v);
  t.interior = interior;
  t.residual = t.gradient + t.potential + t.primitive - t.interior;
  return t;
}

double pohozaev_residual(const StationaryProfile& profile, const NonlinearityModel& model,
                         double r) {
  return pohozaev_terms(profile, model, r).residual;
}

std::vector<StationaryProfile> find_stationary(const NonlinearityModel& model, double R,
                                               StationaryTarget target,
                                               const StationaryOptions& options) {
  check_inputs(R, options);
  std::vector<StationaryProfile> found =
      target.kind == StationaryTarget::Kind::D ? solve_for_d(model, R, target.value, options)
                                               : solve_for_mass(model, R, target.value, options);
  if (found.empty()) {
    std::ostringstream msg;
    msg << "stationary: no solution bracketed for "
        << (target.kind == StationaryTarget::Kind::D ? "d = " : "m = ") << target.value;
    throw NoSolutionFound(msg.str());
  }
  return found;
}

StationaryProfile solve_stationary(const NonlinearityModel& model, double R,
                                   StationaryTarget target, const StationaryOptions& options) {
  check_inputs(R, options);
  if (options.v0_guess && target.kind == StationaryTarget::Kind::D) {
    // converge from the guess: bracket outward, then refine
    const double d = target.value;
    Shooter sh{model, R, options.M, d};
    const double g = *options.v0_guess;
    const double fg = sh.residual(g);
    if (std::isfinite(fg) && std::abs(fg) <= 0.1 * options.tol_bvp) {
      for (double c : constant_levels(model, d))
        if (std::abs(g - c) <= 1e-9 * std::max(1.0, c)) return constant_profile(model, R, c, options.M);
      return assemble(model, R, options.M, d, g);
    }
    for (double step = 1e-3 * std::max(1.0, std::abs(g)); step < 1e3 * std::max(1.0, std::abs(g));
         step *= 2.0) {
      for (double sgn : {-1.0, 1.0}) {
        const double x = g + sgn * step;
        const double fx = sh.residual(x);
        if (!std::isfinite(fg) || !std::isfinite(fx) || fg * fx > 0.0) continue;
        const double a = std::min(g, x), b = std::max(g, x);
        const double root = refine_root(sh, a, b, a == g ? fg : fx, a == g ? fx : fg);
        for (double c : constant_levels(model, d))
          if (std::abs(root - c) <= 1e-6 * std::max(1.0, c))
            return constant_profile(model, R, c, options.M);
        StationaryProfile p = assemble(model, R, options.M, d, root);
        if (p.neumann_residual > options.tol_bvp)
          throw NumericsError("stationary: refinement missed the Neumann tolerance");
        return p;
      }
    }
    throw NoSolutionFound("stationary: no root bracketed near the guess");
  }
  std::vector<StationaryProfile> all = find_stationary(model, R, target, options);
  if (options.v0_guess) {
    auto best = std::min_element(all.begin(), all.end(), [&](const auto& a, const auto& b) {
      return std::abs(a.shoot_v0 - *options.v0_guess) < std::abs(b.shoot_v0 - *options.v0_guess);
    });
    return *best;
  }
  return *std::min_element(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.F_value < b.F_value;
  });
}

std::string profile_csv(const StationaryProfile& p) {
  std::ostringstream out;
  out.precision(17);
  out << "r,v_bar,u_bar\n";
  for (std::size_t i = 0; i < p.v_bar.size(); ++i)
    out << p.grid.centers[i] << ',' << p.v_bar[i] << ',' << p.u_bar[i] << '\n';
  return out.str();
}

std::string profile_json(const StationaryProfile& p) {
  nlohmann::json j;
  j["d"] = p.d;
  j["m"] = p.m;
  j["mass_v"] = p.mass_v;
  j["F"] = p.F_value;
  j["neumann_residual"] = p.neumann_residual;
  j["pohozaev_residual"] = p.pohozaev_residual;
  j["v_bar_0"] = p.shoot_v0;
  j["constant"] = p.constant;
  j["M"] = p.grid.M;
  j["R"] = p.grid.R;
  return j.dump(2);
}

}  // namespace chemolab

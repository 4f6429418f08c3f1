#include "chemolab/regime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chemolab/errors.hpp"

namespace chemolab {

namespace {

constexpr double kEdge = 1e-12;

std::vector<double> log_space(double a, double b, int count, bool include_end) {
  std::vector<double> out;
  out.reserve(count);
  const double la = std::log(a), lb = std::log(b);
  const int denom = include_end ? count - 1 : count;
  for (int i = 0; i < count; ++i) out.push_back(std::exp(la + (lb - la) * i / denom));
  if (include_end) out.back() = b;
  return out;
}

// Secant slope of log f against log x over the top decade of the grid.
double tail_slope(const std::vector<double>& x, const std::vector<double>& fx) {
  const std::size_t last = x.size() - 1;
  std::size_t j = last;
  while (j > 0 && x[j] > x[last] / 10.0) --j;
  if (j == last) j = last - 1;
  return (std::log(fx[last]) - std::log(fx[j])) / (std::log(x[last]) - std::log(x[j]));
}

// The supremum is still increasing at the right end of the grid.
bool growing_at_end(const std::vector<double>& quotient) {
  if (quotient.size() < 10) return false;
  const double top = *std::max_element(quotient.begin(), quotient.end());
  const double last = quotient.back();
  const double earlier = quotient[quotient.size() * 9 / 10];
  return last >= top && last > earlier * (1.0 + 1e-3);
}

}  // namespace

std::string to_string(Region r) {
  switch (r) {
    case Region::GlobalExistence:
      return "GlobalExistence";
    case Region::GlobalWithInfiniteTimeBlowupExamples:
      return "GlobalWithInfiniteTimeBlowupExamples";
    case Region::FiniteTimeBlowup:
      return "FiniteTimeBlowup";
    case Region::OpenGap:
      return "OpenGap";
    case Region::NotCovered:
      return "NotCovered";
  }
  return "NotCovered";
}

RegionMembership power_region_membership(double p, double q, int n) {
  const double c = 2.0 / n;
  RegionMembership m;
  const bool critical = std::abs(p + 2.0 * q - c) <= kEdge || std::abs(q - c) <= kEdge;
  if (!critical) {
    const bool below = p + 2.0 * q < c;
    m.infinite_time_examples = below && q < 0.0 && p > c - q && p < c - 2.0 * q;
    m.global_existence = below && !m.infinite_time_examples;
    m.finite_time_blowup = n >= 3 && q > c && p > c - q && (q >= 1.0 || p <= 0.0);
    m.open_gap = p + q > c && q >= 0.0 && q < c;
  }
  m.not_covered =
      !(m.global_existence || m.infinite_time_examples || m.finite_time_blowup || m.open_gap);
  return m;
}

RegimeVerdict classify_power(double p, double q, int n) {
  if (n < 2) throw ConfigError("classify_power: n must be >= 2");
  RegimeVerdict v;
  v.family = "power";
  v.p = p;
  v.q = q;
  v.n = n;
  const double c = 2.0 / n;
  v.critical = std::abs(p + 2.0 * q - c) <= kEdge || std::abs(q - c) <= kEdge;
  const RegionMembership m = power_region_membership(p, q, n);
  if (m.infinite_time_examples) {
    v.region = Region::GlobalWithInfiniteTimeBlowupExamples;
    v.basis = "global existence for p+2q<2/n; unbounded radial examples for q<0, 2/n-q<p<2/n-2q";
  } else if (m.global_existence) {
    v.region = Region::GlobalExistence;
    v.basis = "global existence for p+2q<2/n";
  } else if (m.finite_time_blowup) {
    v.region = Region::FiniteTimeBlowup;
    v.basis = "finite-time radial blowup for n>=3, q>2/n, p>2/n-q, (q>=1 or p<=0)";
  } else if (m.open_gap) {
    v.region = Region::OpenGap;
    v.basis = "undecided band 0<=q<2/n with p+q>2/n";
  } else {
    v.region = Region::NotCovered;
    v.basis = v.critical ? "critical exponent (p+2q=2/n or q=2/n), excluded by theory"
                         : "outside every proven region";
  }
  return v;
}

RegimeVerdict classify_volume_filling(double gamma, int n, std::optional<double> mass,
                                      bool radial) {
  if (!(gamma > 0.0)) throw ConfigError("classify_volume_filling: gamma must be positive");
  if (n < 2) throw ConfigError("classify_volume_filling: n must be >= 2");
  RegimeVerdict v;
  v.family = "volume_filling";
  v.gamma = gamma;
  v.n = n;
  // Volume filling behaves like the power family with p = gamma, q = 1 - gamma.
  v.p = gamma;
  v.q = 1.0 - gamma;
  const double pi = std::numbers::pi;

  if (n >= 3) {
    const double edge = 2.0 - 2.0 / n;
    v.critical = std::abs(gamma - edge) <= kEdge;
    if (gamma > edge && !v.critical) {
      v.region = Region::GlobalWithInfiniteTimeBlowupExamples;
      v.basis = "volume filling, n>=3, gamma>2-2/n: global existence and radial solutions "
                "unbounded at infinity";
      v.note = "the same condition gamma>2-2/n is stated for both the global-existence and the "
               "infinite-time-blowup clause";
    } else {
      v.region = Region::NotCovered;
      v.basis = v.critical ? "critical gamma=2-2/n" : "volume filling with gamma<=2-2/n, n>=3";
    }
    return v;
  }

  const double general = 4.0 * pi * (1.0 + gamma);
  const double radial_threshold = 8.0 * pi * (1.0 + gamma);
  v.mass_threshold_general = general;
  v.mass_threshold_radial = radial_threshold;

  if (!mass) {
    if (gamma > 1.0) {
      v.region = Region::GlobalWithInfiniteTimeBlowupExamples;
      v.basis = "volume filling, n=2, gamma>1: global existence; unbounded radial solutions "
                "above the critical mass blow up at infinity";
    } else {
      v.region = Region::NotCovered;
      v.basis = "volume filling, n=2: mass-dependent (critical mass)";
    }
    v.note = "bounded below 4pi(1+gamma); radial data bounded below 8pi(1+gamma) and "
             "unbounded examples above it";
    return v;
  }

  const double m = *mass;
  const double threshold = radial ? radial_threshold : general;
  if (std::abs(m - threshold) <= kEdge * threshold) {
    v.critical = true;
    v.region = Region::NotCovered;
    v.basis = "critical mass, excluded by theory";
  } else if (m < general || (radial && m < radial_threshold)) {
    v.region = Region::GlobalExistence;
    v.basis = m < general ? "subcritical mass below 4pi(1+gamma): global and bounded"
                          : "radial subcritical mass below 8pi(1+gamma): global and bounded";
  } else if (radial && m > radial_threshold) {
    if (gamma > 1.0) {
      v.region = Region::GlobalWithInfiniteTimeBlowupExamples;
      v.basis = "supercritical radial mass, gamma>1: unbounded solutions exist and blow up at "
                "infinity";
    } else {
      v.region = Region::NotCovered;
      v.basis = "supercritical radial mass: unbounded solutions exist (finite or infinite time)";
    }
  } else {
    v.region = Region::NotCovered;
    v.basis = "non-radial mass between 4pi(1+gamma) and 8pi(1+gamma)";
  }
  return v;
}

HypothesisReport verify_hypotheses(const NonlinearityModel& model, int n, double s_max,
                                   int grid_size) {
  const double s0 = model.s0();
  if (n < 2) throw ConfigError("verify_hypotheses: n must be >= 2");
  if (!(s_max >= 10.0 * s0)) throw ConfigError("verify_hypotheses: s_max must be >= 10 s0");
  if (grid_size < 100) throw ConfigError("verify_hypotheses: grid_size must be >= 100");

  HypothesisReport rep;
  rep.model = model.name();
  rep.n = n;
  rep.grid.s0 = s0;
  rep.grid.s_max = s_max;
  rep.grid.size = grid_size;
  rep.grid.s_low = 1e-3 * s0;
  rep.grid.upper = log_space(s0, s_max, grid_size, true);
  rep.grid.lower = log_space(rep.grid.s_low, s0, std::max(grid_size / 4, 25), false);

  const auto& up = rep.grid.upper;
  std::vector<double> all = rep.grid.lower;
  all.insert(all.end(), up.begin() + 1, up.end());  // s0 itself has G = 0

  std::vector<double> G_up, G_all, H_all;
  try {
    for (double s : up) G_up.push_back(model.G(s));
    for (double s : all) {
      G_all.push_back(model.G(s));
      H_all.push_back(model.H(s));
    }
  } catch (const NumericsError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericsError(std::string("verify_hypotheses: grid evaluation failed: ") + e.what());
  }

  // G1: G(s) <= a s^(2 - alpha) for s >= s0.
  {
    std::vector<double> xs(up.begin() + 1, up.end());
    std::vector<double> gs(G_up.begin() + 1, G_up.end());
    const double growth = tail_slope(xs, gs);
    rep.g1.best_alpha = 2.0 - growth;
    std::vector<double> quot;
    for (std::size_t i = 0; i < xs.size(); ++i) quot.push_back(gs[i] / std::pow(xs[i], growth));
    rep.g1.constant_a = *std::max_element(quot.begin(), quot.end());
    rep.g1.inconclusive = growing_at_end(quot);
    rep.g1.holds = rep.g1.best_alpha > 2.0 / n && std::isfinite(rep.g1.constant_a) &&
                   !rep.g1.inconclusive;
  }

  // H1: H(s) <= gamma G(s) + b (s+1) for s > 0, b fixed at 1.
  {
    const double b = 1.0;
    rep.h1.constant_b = b;
    std::vector<double> quot;
    for (std::size_t i = 0; i < all.size(); ++i) {
      const double excess = std::max(0.0, H_all[i] - b * (all[i] + 1.0));
      quot.push_back(excess > 0.0 ? excess / G_all[i] : 0.0);
    }
    rep.h1.best_gamma = *std::max_element(quot.begin(), quot.end());
    rep.h1.inconclusive = growing_at_end(quot);
    rep.h1.holds = n >= 3 && rep.h1.best_gamma < (n - 2.0) / n && !rep.h1.inconclusive;
  }

  // PSI: s^2/psi(s) <= L (G(s) + s + 1).
  {
    std::vector<double> quot;
    for (std::size_t i = 0; i < all.size(); ++i) {
      const double s = all[i];
      quot.push_back(s / model.beta(s) / (G_all[i] + s + 1.0));
    }
    rep.psi.constant_L = *std::max_element(quot.begin(), quot.end());
    rep.psi.inconclusive = growing_at_end(quot);
    rep.psi.holds = std::isfinite(rep.psi.constant_L) && !rep.psi.inconclusive;
  }

  // BALANCE: phi >= D1 (s+1)^-p, psi <= D2 (s+1)^q with p + 2q < 2/n.
  {
    std::vector<double> xs(up.begin() + 1, up.end());
    std::vector<double> one_plus, phis, psis;
    for (double s : xs) {
      one_plus.push_back(1.0 + s);
      phis.push_back(model.phi(s));
      psis.push_back(model.psi(s));
    }
    rep.balance.p = -tail_slope(one_plus, phis);
    rep.balance.q = tail_slope(one_plus, psis);
    double d1 = model.phi(0.0);
    double d2 = 0.0;
    std::vector<double> q2;
    for (double s : all) {
      d1 = std::min(d1, model.phi(s) * std::pow(1.0 + s, rep.balance.p));
      q2.push_back(model.psi(s) / std::pow(1.0 + s, rep.balance.q));
      d2 = std::max(d2, q2.back());
    }
    rep.balance.D1 = d1;
    rep.balance.D2 = d2;
    rep.balance.holds = d1 > 0.0 && std::isfinite(d2) && !growing_at_end(q2) &&
                        rep.balance.p + 2.0 * rep.balance.q < 2.0 / n;
  }

  // GH2 (n = 2): G <= a s (ln s)^mu, H <= b s / ln s for s >= s_start > 1.
  if (n == 2) {
    GH2Check& c = rep.gh2;
    c.applicable = true;
    c.s_start = std::max(s0, std::exp(1.0));
    std::vector<double> xs;
    for (double s : up)
      if (s >= c.s_start) xs.push_back(s);
    if (xs.size() < 10) xs = log_space(c.s_start, s_max, 100, true);
    std::vector<double> lnx, g_over_s, h_quot;
    for (double s : xs) {
      lnx.push_back(std::log(s));
      g_over_s.push_back(model.G(s) / s);
      h_quot.push_back(model.H(s) * std::log(s) / s);
    }
    // Slope of ln(G/s) against ln ln s over s in [sqrt(s_max), s_max]: a
    // decade of ln s would reach down to s ~ 4, where lower-order terms of G
    // still dominate.
    {
      const std::size_t last = lnx.size() - 1;
      std::size_t j = last;
      while (j > 0 && lnx[j] > 0.5 * lnx[last]) --j;
      if (j == last) j = last - 1;
      c.mu = (std::log(g_over_s[last]) - std::log(g_over_s[j])) /
             (std::log(lnx[last]) - std::log(lnx[j]));
    }
    std::vector<double> g_quot;
    for (std::size_t i = 0; i < xs.size(); ++i)
      g_quot.push_back(g_over_s[i] / std::pow(lnx[i], c.mu));
    c.a = *std::max_element(g_quot.begin(), g_quot.end());
    c.b = *std::max_element(h_quot.begin(), h_quot.end());
    c.g_bound = c.mu > 0.0 && c.mu < 1.0 && !growing_at_end(g_quot);
    c.h_bound = !growing_at_end(h_quot);
    c.marginal = std::abs(1.0 - c.mu) < 0.2;
    c.holds = c.g_bound && c.h_bound;
  }
  return rep;
}

bool hypothesis_constants_reproduce(const NonlinearityModel& model,
                                    const HypothesisReport& rep) {
  const double slack = 1e-9;
  const auto leq = [slack](double lhs, double rhs) {
    return lhs <= rhs + slack * std::max(1.0, std::abs(rhs));
  };
  std::vector<double> all = rep.grid.lower;
  all.insert(all.end(), rep.grid.upper.begin() + 1, rep.grid.upper.end());

  for (std::size_t i = 1; i < rep.grid.upper.size(); ++i) {
    const double s = rep.grid.upper[i];
    if (!leq(model.G(s), rep.g1.constant_a * std::pow(s, 2.0 - rep.g1.best_alpha))) return false;
  }
  for (double s : all) {
    const double G = model.G(s);
    if (!leq(model.H(s), rep.h1.best_gamma * G + rep.h1.constant_b * (s + 1.0))) return false;
    if (!leq(s * s / model.psi(s), rep.psi.constant_L * (G + s + 1.0))) return false;
    if (!leq(rep.balance.D1 * std::pow(1.0 + s, -rep.balance.p), model.phi(s))) return false;
    if (!leq(model.psi(s), rep.balance.D2 * std::pow(1.0 + s, rep.balance.q))) return false;
  }
  if (rep.gh2.applicable) {
    for (double s : rep.grid.upper) {
      if (s < rep.gh2.s_start) continue;
      const double ls = std::log(s);
      if (!leq(model.G(s), rep.gh2.a * s * std::pow(ls, rep.gh2.mu))) return false;
      if (!leq(model.H(s), rep.gh2.b * s / ls)) return false;
    }
  }
  // Flags must follow from the constants.
  if (rep.g1.holds != (rep.g1.best_alpha > 2.0 / rep.n && !rep.g1.inconclusive)) return false;
  if (rep.h1.holds !=
      (rep.n >= 3 && rep.h1.best_gamma < (rep.n - 2.0) / rep.n && !rep.h1.inconclusive))
    return false;
  return true;
}

}  // namespace chemolab

#include "chemolab/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chemolab {

std::string to_string(BlowupStatus s) {
  switch (s) {
    case BlowupStatus::Bounded: return "Bounded";
    case BlowupStatus::SuspectedFiniteTimeBlowup: return "SuspectedFiniteTimeBlowup";
    case BlowupStatus::SuspectedInfiniteTimeGrowth: return "SuspectedInfiniteTimeGrowth";
    case BlowupStatus::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms = std::numeric_limits<double>::infinity();
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit fit;
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
  if (!(sxx > 0.0)) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

// Least squares for y = a + b L + c L^2 via the 3x3 normal equations.
double quadratic_rms(const std::vector<double>& L, const std::vector<double>& y) {
  // center and scale L for conditioning
  double lo = *std::min_element(L.begin(), L.end());
  double hi = *std::max_element(L.begin(), L.end());
  const double mid = 0.5 * (lo + hi), half = std::max(0.5 * (hi - lo), 1e-300);
  double S[3][4] = {};
  for (std::size_t i = 0; i < L.size(); ++i) {
    const double x = (L[i] - mid) / half;
    const double b[3] = {1.0, x, x * x};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) S[r][c] += b[r] * b[c];
      S[r][3] += b[r] * y[i];
    }
  }
  // Gaussian elimination with partial pivoting
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(S[r][col]) > std::abs(S[piv][col])) piv = r;
    std::swap(S[col], S[piv]);
    if (std::abs(S[col][col]) < 1e-300) return std::numeric_limits<double>::infinity();
    for (int r = col + 1; r < 3; ++r) {
      const double f = S[r][col] / S[col][col];
      for (int c = col; c < 4; ++c) S[r][c] -= f * S[col][c];
    }
  }
  double coef[3];
  for (int r = 2; r >= 0; --r) {
    double acc = S[r][3];
    for (int c = r + 1; c < 3; ++c) acc -= S[r][c] * coef[c];
    coef[r] = acc / S[r][r];
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    const double x = (L[i] - mid) / half;
    const double r = y[i] - (coef[0] + coef[1] * x + coef[2] * x * x);
    ss += r * r;
  }
  return std::sqrt(ss / double(L.size()));
}

struct PowerLawFit {
  double t_star = 0.0;
  double kappa = 0.0;
  double rms = std::numeric_limits<double>::infinity();
};

// log s = c - kappa log(T* - t), scanning T* beyond the last sample.
PowerLawFit fit_power_law(const std::vector<double>& t, const std::vector<double>& logs) {
  PowerLawFit best;
  const double t_last = t.back();
  const double span = std::max(t_last - t.front(), 1e-300);
  std::vector<double> x(t.size());
  auto eval = [&](double t_star) {
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::log(t_star - t[i]);
    const LinearFit f = fit_line(x, logs);
    PowerLawFit p;
    p.t_star = t_star;
    p.kappa = -f.slope;
    p.rms = f.rms;
    return p;
  };
  // log-spaced offsets from 1e-8 to 1e3 spans
  const int N = 221;
  double best_log = 0.0;
  for (int i = 0; i < N; ++i) {
    const double lg = -8.0 + 11.0 * i / (N - 1);
    const PowerLawFit p = eval(t_last + span * std::pow(10.0, lg));
    if (p.kappa > 0.0 && p.rms < best.rms) {
      best = p;
      best_log = lg;
    }
  }
  if (!std::isfinite(best.rms)) return best;
  // golden-section refinement in the log offset
  double a = best_log - 0.05, b = best_log + 0.05;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    const PowerLawFit pc = eval(t_last + span * std::pow(10.0, c));
    const PowerLawFit pd = eval(t_last + span * std::pow(10.0, d));
    if (pc.rms < pd.rms) b = d; else a = c;
  }
  const PowerLawFit p = eval(t_last + span * std::pow(10.0, 0.5 * (a + b)));
  if (p.kappa > 0.0 && p.rms < best.rms) best = p;
  return best;
}

}  // namespace

BlowupVerdict detect_blowup(const std::vector<std::pair<double, double>>& sup_history,
                            const std::vector<std::pair<double, double>>& dt_history,
                            const BlowupCriteria& criteria) {
  BlowupVerdict v;
  v.sup_history = sup_history;
  const std::size_t n = sup_history.size();
  if (n < 10) {
    v.note = "fewer than 10 samples";
    return v;
  }
  const double first = sup_history.front().second;
  const double last = sup_history.back().second;
  double sup_max = 0.0;
  for (const auto& s : sup_history) sup_max = std::max(sup_max, s.second);
  v.threshold_crossed = sup_max > criteria.blowup_threshold;

  // dt collapse: the tail step is near dt_min or 100x below the median over
  // the first half of the time span. Halving by time rather than by count
  // matters: near a singularity most accepted steps crowd into the end.
  if (!dt_history.empty()) {
    const double t_mid = 0.5 * (dt_history.front().first + dt_history.back().first);
    std::vector<double> early;
    for (const auto& [t, dt] : dt_history)
      if (t <= t_mid) early.push_back(dt);
    if (early.empty()) early.push_back(dt_history.front().second);
    std::nth_element(early.begin(), early.begin() + early.size() / 2, early.end());
    const double ref = early[early.size() / 2];
    const double tail = dt_history.back().second;
    v.dt_collapsed = tail <= criteria.collapse_factor * criteria.dt_min ||
                     tail <= ref / criteria.collapse_factor;
  }

  // fits on the tail half
  std::vector<double> t, logs, L;
  for (std::size_t i = n / 2; i < n; ++i) {
    t.push_back(sup_history[i].first);
    logs.push_back(std::log(std::max(sup_history[i].second, 1e-300)));
    L.push_back(std::log1p(std::max(sup_history[i].first, 0.0)));
  }
  const PowerLawFit pl = fit_power_law(t, logs);
  v.power_law_rms = pl.rms;
  v.kappa = pl.kappa;
  v.poly_log_rms = quadratic_rms(L, logs);
  const bool power_wins = std::isfinite(pl.rms) && pl.rms < v.poly_log_rms;

  bool monotone = true;
  for (std::size_t i = n / 2 + 1; i < n; ++i)
    if (sup_history[i].second < sup_history[i - 1].second * (1.0 - 1e-9)) monotone = false;
  const bool grew = last > 10.0 * first && monotone;

  if (v.threshold_crossed && v.dt_collapsed && power_wins) {
    v.status = BlowupStatus::SuspectedFiniteTimeBlowup;
    v.t_star_estimate = pl.t_star;
    v.note = "threshold crossed with collapsing dt; power-law tail fits best";
    return v;
  }
  if (grew && !v.dt_collapsed && (!power_wins || v.threshold_crossed)) {
    v.status = BlowupStatus::SuspectedInfiniteTimeGrowth;
    v.note = power_wins ? "threshold crossed with dt bounded away from dt_min"
                        : "sustained growth; poly-log tail fits best";
    return v;
  }
  // eventually non-increasing: no growth over the last quarter beyond 0.1%
  const std::size_t q = n - std::max<std::size_t>(n / 4, 2);
  double tail_max = 0.0;
  for (std::size_t i = q; i < n; ++i) tail_max = std::max(tail_max, sup_history[i].second);
  bool settled = tail_max <= sup_history[q].second * (1.0 + 1e-3);
  if (!settled) {
    settled = true;
    for (std::size_t i = q + 1; i < n; ++i)
      if (sup_history[i].second > sup_history[i - 1].second * (1.0 + 1e-12)) settled = false;
  }
  if (settled && !v.threshold_crossed) {
    v.status = BlowupStatus::Bounded;
    v.note = "sup norm eventually non-increasing";
    return v;
  }
  v.note = "no growth pattern matched";
  return v;
}

}  // namespace chemolab

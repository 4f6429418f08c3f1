#include "chemolab/simulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "chemolab/errors.hpp"

namespace chemolab {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::EndTime: return "end_time";
    case StopReason::ThresholdCrossed: return "threshold_crossed";
    case StopReason::Stagnation: return "stagnation";
    case StopReason::StepLimit: return "step_limit";
  }
  return "end_time";
}

std::vector<double> default_exponents(const NonlinearityModel& model) {
  if (model.kind() == ModelKind::VolumeFilling) return {2.0, model.gamma() + 2.0};
  return {2.0, 3.0};
}

namespace {

double max_of(const std::vector<double>& x) { return *std::max_element(x.begin(), x.end()); }

void renormalize(std::vector<double>& u, double m, const RadialGrid& grid) {
  const double mass = integrate_cells(u, grid);
  if (!(mass > 0.0)) throw ConfigError("initial data: density has no mass");
  const double s = m / mass;
  for (double& x : u) x *= s;
}

// v = lambda z_k^+ on cell centres (mean taken over the grid), u = Xi^{-1}(v + d)
// with d chosen so that the discrete mass is m.
InitialData lifted_bump(const InitialDataSpec& spec, const RadialGrid& grid,
                        const NonlinearityModel& model, double k, double lambda) {
  const int M = grid.M;
  std::vector<double> z(M);
  const double e2 = 1.0 / (k * k);
  double mean = 0.0;
  for (int i = 0; i < M; ++i) {
    const double r = grid.centers[i];
    z[i] = std::log(e2) - 2.0 * std::log(e2 + std::numbers::pi * r * r);
    mean += grid.volumes[i] * z[i];
  }
  mean /= grid.domain_volume();
  InitialData out;
  out.k = k;
  auto& v = out.state.v;
  auto& u = out.state.u;
  v.resize(M);
  u.resize(M);
  for (int i = 0; i < M; ++i) v[i] = lambda * std::max(0.0, z[i] - mean);

  const auto mass_gap = [&](double d) {
    double s = 0.0;
    for (int i = 0; i < M; ++i) s += grid.volumes[i] * model.Xi_inverse(v[i] + d);
    return s - spec.mass;
  };
  // mass is increasing in d: bracket by stepping outwards
  double lo = -1.0, hi = 1.0;
  while (mass_gap(lo) > 0.0) {
    lo = 2.0 * lo - 1.0;
    if (lo < -1e4) throw NumericsError("initial data: cannot bracket the mass constant");
  }
  while (mass_gap(hi) < 0.0) {
    hi = 2.0 * hi + 1.0;
    if (hi > 1e4) throw NumericsError("initial data: cannot bracket the mass constant");
  }
  boost::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      mass_gap, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  out.d = 0.5 * (root.first + root.second);
  for (int i = 0; i < M; ++i) u[i] = model.Xi_inverse(v[i] + out.d);
  renormalize(u, spec.mass, grid);
  out.energy = liapunov_F(out.state, grid, model);
  return out;
}

}  // namespace

InitialData make_initial_data_ex(const InitialDataSpec& spec, const RadialGrid& grid,
                                 const NonlinearityModel& model) {
  const int M = grid.M;
  InitialData out;
  switch (spec.family) {
    case InitialFamily::ConstantPair: {
      if (!(spec.c > 0.0)) throw ConfigError("ConstantPair: level must be positive");
      out.state.u.assign(M, spec.c);
      out.state.v.assign(M, spec.c);
      break;
    }
    case InitialFamily::GaussianBump: {
      if (!(spec.mass > 0.0)) throw ConfigError("GaussianBump: mass must be positive");
      if (!(spec.sigma > 0.0)) throw ConfigError("GaussianBump: width must be positive");
      if (!(spec.floor > 0.0)) throw ConfigError("GaussianBump: floor must be positive");
      std::vector<double> g(M);
      for (int i = 0; i < M; ++i) {
        const double r = grid.centers[i];
        g[i] = std::exp(-r * r / (2.0 * spec.sigma * spec.sigma));
      }
      const double amp = (spec.mass - spec.floor * grid.domain_volume()) / integrate_cells(g, grid);
      if (!(amp > 0.0))
        throw ConfigError("GaussianBump: floor level already exceeds the prescribed mass");
      auto& u = out.state.u;
      u.resize(M);
      for (int i = 0; i < M; ++i) u[i] = spec.floor + amp * g[i];
      renormalize(u, spec.mass, grid);
      out.state.v = solve_elliptic(u, grid);
      break;
    }
    case InitialFamily::EnergyTargetedBump: {
      if (!(spec.mass > 0.0)) throw ConfigError("EnergyTargetedBump: mass must be positive");
      if (!(spec.k_start >= 1.0)) throw ConfigError("EnergyTargetedBump: k_start must be >= 1");
      const double lambda = spec.lambda.value_or(
          model.kind() == ModelKind::VolumeFilling ? 1.0 + model.gamma() : 1.0);
      if (!(lambda > 0.0)) throw ConfigError("EnergyTargetedBump: lambda must be positive");
      const double finest = 2.0 * grid.min_width();
      double last_energy = 0.0;
      for (double k = spec.k_start; 1.0 / k >= finest; k *= 2.0) {
        InitialData cand = lifted_bump(spec, grid, model, k, lambda);
        if (spec.A > 0.0) {
          const auto rec = norms(cand.state, grid, {2.0});
          const double vl2 = integrate_cells(
              [&] {
                std::vector<double> sq(M);
                for (int i = 0; i < M; ++i) sq[i] = cand.state.v[i] * cand.state.v[i];
                return sq;
              }(),
              grid);
          if (std::sqrt(rec.grad_v_L2 + vl2) > spec.A) {
            std::ostringstream msg;
            msg << "EnergyTargetedBump: W^{1,2} norm of v0 exceeds A = " << spec.A
                << " at k = " << k << " before F reached " << spec.target_energy;
            throw EnergyTargetNotReached(msg.str());
          }
        }
        last_energy = cand.energy;
        if (cand.energy <= spec.target_energy) return cand;
      }
      std::ostringstream msg;
      msg << "EnergyTargetedBump: F(u0, v0) = " << last_energy << " still above target "
          << spec.target_energy << " at the grid resolution limit";
      throw EnergyTargetNotReached(msg.str());
    }
  }
  out.energy = liapunov_F(out.state, grid, model);
  return out;
}

RadialState make_initial_data(const InitialDataSpec& spec, const RadialGrid& grid,
                              const NonlinearityModel& model) {
  return make_initial_data_ex(spec, grid, model).state;
}

void validate(const SimConfig& c) {
  const auto fail = [](const std::string& m) { throw ConfigError("config: " + m); };
  if (c.n < 2) fail("dimension must be >= 2");
  if (!(c.R > 0.0)) fail("radius must be positive");
  if (c.M < 8) fail("need at least 8 cells");
  if (!(c.stretch >= 1.0)) fail("stretch must be >= 1");
  if (!(c.dt_min > 0.0 && c.dt_min < c.dt_init && c.dt_init <= c.dt_max))
    fail("need 0 < dt_min < dt_init <= dt_max");
  if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0)) fail("cfl_safety must lie in (0, 1]");
  if (!(c.t_end > 0.0)) fail("t_end must be positive");
  if (!(c.output_dt > 0.0)) fail("output cadence must be positive");
  if (!(c.blowup_threshold > 0.0) && !(c.blowup_factor > 1.0))
    fail("blowup threshold must be positive (or blowup_factor > 1)");
  if (c.stagnation_steps < 1) fail("stagnation_steps must be >= 1");
  if (c.checkpoint_every < 0 || c.max_steps < 0) fail("step counts must be nonnegative");
  if (c.checkpoint_every > 0 && c.checkpoint_path.empty())
    fail("checkpoint_every set without a checkpoint path");
  for (double p : c.lp_exponents)
    if (!(p >= 1.0)) fail("L^p exponents must be >= 1");
}

namespace {

int model_kind_code(const NonlinearityModel& m) { return static_cast<int>(m.kind()); }

void check_restart_matches(const Checkpoint& cp, const SimConfig& c) {
  const bool same = cp.n == c.n && cp.R == c.R && cp.M == c.M && cp.stretch == c.stretch &&
                    cp.model_kind == model_kind_code(c.model) && cp.p == c.model.p() &&
                    cp.q == c.model.q() && cp.gamma == c.model.gamma() &&
                    cp.s0 == c.model.s0() && cp.scheme == static_cast<int>(c.scheme);
  if (!same) throw ConfigError("restart: checkpoint does not match the configured grid/model");
}

}  // namespace

RunResult run(const SimConfig& config, const StepObserver& observer) {
  validate(config);
  RunResult res;
  res.grid = build_grid(config.n, config.R, config.M, config.stretch);
  const RadialGrid& grid = res.grid;
  Stepper stepper(grid, config.model, config.scheme);

  double dt = config.dt_init;
  long steps = 0;
  int stagnant = 0;
  if (!config.restart_path.empty()) {
    Checkpoint cp = read_checkpoint(config.restart_path);
    check_restart_matches(cp, config);
    stepper.reset(std::move(cp.state));
    dt = cp.dt_next;
    steps = cp.steps;
    stagnant = cp.stagnant;
    res.sup_initial = cp.sup_initial;
    res.mass_initial = cp.mass_initial;
  } else {
    RadialState init = make_initial_data(config.initial, grid, config.model);
    res.sup_initial = max_of(init.u);
    res.mass_initial = integrate_cells(init.u, grid);
    stepper.reset(std::move(init));
  }
  const double threshold =
      config.blowup_factor > 0.0 ? config.blowup_factor * res.sup_initial : config.blowup_threshold;
  if (!(threshold > res.sup_initial))
    throw ConfigError("config: blowup threshold must exceed the initial sup norm");
  const std::vector<double> exps =
      config.lp_exponents.empty() ? default_exponents(config.model) : config.lp_exponents;

  const auto next_output_after = [&](double t) {
    return (std::floor(t / config.output_dt + 1e-9) + 1.0) * config.output_dt;
  };
  std::vector<std::pair<double, double>> sup_samples;
  const auto sample = [&](double h) {
    const double t = stepper.state().t;
    sup_samples.emplace_back(t, max_of(stepper.state().u));
    if (h > 0.0) res.dt_history.emplace_back(t, h);
  };

  res.history.push_back(make_record(stepper.state(), nullptr, grid, config.model, exps,
                                    config.scheme));
  sample(0.0);
  double next_output = next_output_after(stepper.state().t);
  double last_sampled_sup = sup_samples.back().second;
  double last_recorded_t = stepper.state().t;
  res.min_dt = dt;
  const double t_tol = 1e-12 * std::max(1.0, config.t_end);

  res.stop = StopReason::EndTime;
  while (true) {
    const double t = stepper.state().t;
    if (config.t_end - t <= t_tol) {
      res.stop = StopReason::EndTime;
      break;
    }
    if (config.max_steps > 0 && steps >= config.max_steps) {
      res.stop = StopReason::StepLimit;
      break;
    }
    const double cfl = stepper.stable_dt(config.cfl_safety);
    if (cfl < config.dt_min) {
      if (++stagnant >= config.stagnation_steps) {
        res.stop = StopReason::Stagnation;
        break;
      }
    } else {
      stagnant = 0;
    }
    double h = std::min({dt, config.dt_max, cfl});
    h = std::min(h, config.t_end - t);
    if (!stepper.try_step(h)) {
      ++res.rejected;
      if (h <= config.dt_min) {
        res.stop = StopReason::Stagnation;
        break;
      }
      dt = std::max(0.5 * h, config.dt_min);
      continue;
    }
    ++steps;
    dt = std::clamp(1.2 * h, config.dt_min, config.dt_max);
    res.min_dt = std::min(res.min_dt, h);

    const RadialState& now = stepper.state();
    const double mass = integrate_cells(now.u, grid);
    res.max_mass_drift =
        std::max(res.max_mass_drift, std::abs(mass - res.mass_initial) / res.mass_initial);
    if (observer) observer(StepInfo{stepper.previous(), now, h});

    const double sup = max_of(now.u);
    const bool output_due = now.t >= next_output - t_tol;
    if (output_due || sup >= 1.02 * last_sampled_sup) {
      sample(h);
      last_sampled_sup = sup;
    }
    if (output_due) {
      res.history.push_back(make_record(now, &stepper.previous(), grid, config.model, exps,
                                        config.scheme));
      last_recorded_t = now.t;
      next_output = next_output_after(now.t);
    }
    if (config.checkpoint_every > 0 && steps % config.checkpoint_every == 0) {
      write_checkpoint(config.checkpoint_path,
                       make_checkpoint(config, now, steps, dt, res.sup_initial, res.mass_initial, stagnant));
    }
    if (sup > threshold) {
      res.stop = StopReason::ThresholdCrossed;
      break;
    }
  }

  const RadialState& fin = stepper.state();
  if (fin.t > last_recorded_t) {
    const RadialState* prev = fin.t > stepper.previous().t ? &stepper.previous() : nullptr;
    res.history.push_back(make_record(fin, prev, grid, config.model, exps, config.scheme));
  }
  if (sup_samples.back().first < fin.t) sample(fin.t - stepper.previous().t);

  BlowupCriteria crit;
  crit.blowup_threshold = threshold;
  crit.dt_min = config.dt_min;
  res.verdict = detect_blowup(sup_samples, res.dt_history, crit);
  if (res.stop == StopReason::Stagnation && !res.verdict.threshold_crossed) {
    res.verdict.status = BlowupStatus::Inconclusive;
    res.verdict.t_star_estimate.reset();
    res.verdict.note = "stagnation: time step pinned at dt_min";
  }
  res.steps = steps;
  res.dt_next = dt;
  res.stagnant = stagnant;
  res.final_state = fin;
  return res;
}

Checkpoint make_checkpoint(const SimConfig& config, const RadialState& state, long steps,
                           double dt_next, double sup_initial, double mass_initial, int stagnant) {
  Checkpoint cp;
  cp.n = config.n;
  cp.R = config.R;
  cp.M = config.M;
  cp.stretch = config.stretch;
  cp.model_kind = model_kind_code(config.model);
  cp.p = config.model.p();
  cp.q = config.model.q();
  cp.gamma = config.model.gamma();
  cp.s0 = config.model.s0();
  cp.scheme = static_cast<int>(config.scheme);
  cp.steps = steps;
  cp.dt_next = dt_next;
  cp.sup_initial = sup_initial;
  cp.mass_initial = mass_initial;
  cp.stagnant = stagnant;
  cp.state = state;
  return cp;
}

Checkpoint final_checkpoint(const SimConfig& config, const RunResult& result) {
  return make_checkpoint(config, result.final_state, result.steps, result.dt_next,
                         result.sup_initial, result.mass_initial, result.stagnant);
}

// ---------------------------------------------------------------------------
// checkpoints

namespace {

constexpr char kMagic[8] = {'C', 'H', 'E', 'M', 'O', 'L', 'A', 'B'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t x) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}
void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }
void put_i64(std::ostream& out, std::int64_t x) { put_u64(out, static_cast<std::uint64_t>(x)); }

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ConfigError("checkpoint: truncated file");
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= std::uint64_t(b[i]) << (8 * i);
  return x;
}
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }
std::int64_t get_i64(std::istream& in) { return static_cast<std::int64_t>(get_u64(in)); }

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("checkpoint: cannot open " + tmp);
    out.write(kMagic, 8);
    put_u64(out, kVersion);
    put_i64(out, cp.n);
    put_f64(out, cp.R);
    put_i64(out, cp.M);
    put_f64(out, cp.stretch);
    put_i64(out, cp.model_kind);
    put_f64(out, cp.p);
    put_f64(out, cp.q);
    put_f64(out, cp.gamma);
    put_f64(out, cp.s0);
    put_i64(out, cp.scheme);
    put_f64(out, cp.state.t);
    put_i64(out, cp.steps);
    put_f64(out, cp.dt_next);
    put_f64(out, cp.sup_initial);
    put_f64(out, cp.mass_initial);
    put_i64(out, cp.stagnant);
    for (double x : cp.state.u) put_f64(out, x);
    for (double x : cp.state.v) put_f64(out, x);
    if (!out) throw NumericsError("checkpoint: write failed for " + tmp);
  }
  std::rename(tmp.c_str(), path.c_str());
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint: cannot open " + path);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw ConfigError("checkpoint: bad magic in " + path);
  if (get_u64(in) != kVersion) throw ConfigError("checkpoint: unsupported version");
  Checkpoint cp;
  cp.n = static_cast<int>(get_i64(in));
  cp.R = get_f64(in);
  cp.M = static_cast<int>(get_i64(in));
  cp.stretch = get_f64(in);
  cp.model_kind = static_cast<int>(get_i64(in));
  cp.p = get_f64(in);
  cp.q = get_f64(in);
  cp.gamma = get_f64(in);
  cp.s0 = get_f64(in);
  cp.scheme = static_cast<int>(get_i64(in));
  cp.state.t = get_f64(in);
  cp.steps = get_i64(in);
  cp.dt_next = get_f64(in);
  cp.sup_initial = get_f64(in);
  cp.mass_initial = get_f64(in);
  cp.stagnant = static_cast<int>(get_i64(in));
  if (cp.M < 1 || cp.M > (1 << 26)) throw ConfigError("checkpoint: implausible cell count");
  cp.state.u.resize(cp.M);
  cp.state.v.resize(cp.M);
  for (double& x : cp.state.u) x = get_f64(in);
  for (double& x : cp.state.v) x = get_f64(in);
  return cp;
}

}  // namespace chemolab

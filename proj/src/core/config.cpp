#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "chemolab/errors.hpp"
#include "chemolab/harness.hpp"

namespace chemolab {

namespace pt = boost::property_tree;

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Single: return "single";
    case Experiment::CriticalMassSweep: return "critical_mass_sweep";
    case Experiment::PhaseDiagram: return "phase_diagram";
    case Experiment::StruweSweep: return "struwe_sweep";
    case Experiment::StationaryScan: return "stationary_scan";
  }
  return "single";
}

std::vector<double> Range::values() const {
  std::vector<double> out;
  if (count <= 1) {
    out.push_back(start);
    return out;
  }
  for (int i = 0; i < count; ++i) out.push_back(start + (stop - start) * i / (count - 1));
  return out;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(text, &pos);
    if (trim(text.substr(pos)).empty() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' expects a finite number, got '" + text + "'");
}

long to_long(const std::string& key, const std::string& text) {
  const double x = to_double(key, text);
  if (x != std::floor(x) || std::abs(x) > 9e15)
    throw ConfigError("config: '" + key + "' expects an integer, got '" + text + "'");
  return long(x);
}

bool to_bool(const std::string& key, const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ConfigError("config: '" + key + "' expects a boolean, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(key, item));
  return out;
}

Range to_range(const std::string& key, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("config: '" + key + "' expects start:stop:count");
  Range r{to_double(key, parts[0]), to_double(key, parts[1]), int(to_long(key, parts[2]))};
  if (r.count < 1) throw ConfigError("config: '" + key + "' count must be positive");
  return r;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ", ";
    if constexpr (std::is_floating_point_v<T>) out += fmt(x);
    else out += std::to_string(x);
  }
  return out;
}

// Reads one section, rejecting keys the schema does not know.
class Section {
 public:
  Section(const pt::ptree& root, const std::string& name, std::set<std::string> allowed)
      : name_(name) {
    if (auto child = root.get_child_optional(name)) {
      for (const auto& [key, node] : *child) {
        if (!node.empty()) throw ConfigError("config: nested keys are not supported in [" + name + "]");
        if (!allowed.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
        values_[key] = trim(node.data());
      }
    }
  }
  bool has(const std::string& k) const { return values_.count(k) > 0; }
  std::string key(const std::string& k) const { return name_ + "." + k; }
  std::string str(const std::string& k, const std::string& dflt) const {
    return has(k) ? values_.at(k) : dflt;
  }
  double num(const std::string& k, double dflt) const {
    return has(k) ? to_double(key(k), values_.at(k)) : dflt;
  }
  long integer(const std::string& k, long dflt) const {
    return has(k) ? to_long(key(k), values_.at(k)) : dflt;
  }
  bool flag(const std::string& k, bool dflt) const {
    return has(k) ? to_bool(key(k), values_.at(k)) : dflt;
  }
  std::vector<double> list(const std::string& k) const {
    return has(k) ? to_list(key(k), values_.at(k)) : std::vector<double>{};
  }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
};

Experiment parse_experiment(const std::string& s) {
  for (Experiment e : {Experiment::Single, Experiment::CriticalMassSweep, Experiment::PhaseDiagram,
                       Experiment::StruweSweep, Experiment::StationaryScan})
    if (to_string(e) == s) return e;
  throw ConfigError("config: unknown experiment type '" + s + "'");
}

InitialFamily parse_family(const std::string& s) {
  if (s == "constant") return InitialFamily::ConstantPair;
  if (s == "gaussian") return InitialFamily::GaussianBump;
  if (s == "energy_targeted") return InitialFamily::EnergyTargetedBump;
  throw ConfigError("config: unknown initial family '" + s + "'");
}

std::string family_name(InitialFamily f) {
  switch (f) {
    case InitialFamily::ConstantPair: return "constant";
    case InitialFamily::GaussianBump: return "gaussian";
    case InitialFamily::EnergyTargetedBump: return "energy_targeted";
  }
  return "gaussian";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  static const std::set<std::string> sections = {"experiment", "model",  "grid",  "time",
                                                 "initial",    "sweep",  "output"};
  for (const auto& [name, node] : root) {
    if (!sections.count(name)) throw ConfigError("config: unknown section [" + name + "]");
    (void)node;
  }

  RunConfig c;
  const Section ex(root, "experiment",
                   {"type", "name", "workers", "seed", "strict", "require_verdict"});
  c.experiment = parse_experiment(ex.str("type", "single"));
  c.name = ex.str("name", c.name);
  c.workers = int(ex.integer("workers", 0));
  if (c.workers < 0) throw ConfigError("config: experiment.workers must be nonnegative");
  const long seed = ex.integer("seed", 0);
  if (seed < 0) throw ConfigError("config: experiment.seed must be nonnegative");
  c.seed = std::uint64_t(seed);
  c.strict = ex.flag("strict", false);
  c.require_verdict = ex.flag("require_verdict", false);

  const Section mo(root, "model", {"kind", "p", "q", "gamma", "s0"});
  const std::string kind = mo.str("kind", "volume_filling");
  const double s0 = mo.num("s0", 1.0);
  if (!(s0 > 0.0)) throw ConfigError("config: model.s0 must be positive");
  if (kind == "volume_filling") {
    const double g = mo.num("gamma", 1.0);
    if (!(g > 0.0)) throw ConfigError("config: model.gamma must be positive");
    if (mo.has("p") || mo.has("q")) throw ConfigError("config: p/q given for a volume_filling model");
    c.sim.model = NonlinearityModel::volume_filling(g, s0);
  } else if (kind == "power") {
    if (!mo.has("p") || !mo.has("q")) throw ConfigError("config: power model needs p and q");
    if (mo.has("gamma")) throw ConfigError("config: gamma given for a power model");
    c.sim.model = NonlinearityModel::power_type(mo.num("p", 0.0), mo.num("q", 1.0), s0);
  } else {
    throw ConfigError("config: unknown model kind '" + kind + "' (power | volume_filling)");
  }

  const Section gr(root, "grid", {"n", "R", "M", "stretch"});
  c.sim.n = int(gr.integer("n", 2));
  c.sim.R = gr.num("R", 1.0);
  c.sim.M = int(gr.integer("M", 256));
  c.sim.stretch = gr.num("stretch", 1.0);

  const Section ti(root, "time", {"t_end", "dt_init", "dt_min", "dt_max", "cfl", "scheme",
                                  "blowup_threshold", "blowup_factor", "max_steps",
                                  "stagnation_steps", "checkpoint_every", "restart"});
  c.sim.t_end = ti.num("t_end", c.sim.t_end);
  c.sim.dt_init = ti.num("dt_init", c.sim.dt_init);
  c.sim.dt_min = ti.num("dt_min", c.sim.dt_min);
  c.sim.dt_max = ti.num("dt_max", c.sim.dt_max);
  c.sim.cfl_safety = ti.num("cfl", c.sim.cfl_safety);
  const std::string scheme = ti.str("scheme", "upwind");
  if (scheme == "upwind") c.sim.scheme = FaceScheme::Upwind;
  else if (scheme == "central") c.sim.scheme = FaceScheme::Central;
  else throw ConfigError("config: unknown scheme '" + scheme + "'");
  c.sim.blowup_threshold = ti.num("blowup_threshold", c.sim.blowup_threshold);
  c.sim.blowup_factor = ti.num("blowup_factor", c.sim.blowup_factor);
  c.sim.max_steps = ti.integer("max_steps", 0);
  c.sim.stagnation_steps = int(ti.integer("stagnation_steps", c.sim.stagnation_steps));
  c.sim.checkpoint_every = ti.integer("checkpoint_every", 0);
  c.sim.restart_path = ti.str("restart", "");

  const Section in(root, "initial", {"family", "c", "mass", "mass_over_critical", "sigma",
                                     "floor", "A", "target_energy", "k_start", "lambda"});
  InitialDataSpec& s = c.sim.initial;
  s.family = parse_family(in.str("family", "gaussian"));
  s.c = in.num("c", s.c);
  if (in.has("mass") && in.has("mass_over_critical"))
    throw ConfigError("config: give either initial.mass or initial.mass_over_critical");
  if (in.has("mass_over_critical")) {
    if (c.sim.model.kind() != ModelKind::VolumeFilling || c.sim.n != 2)
      throw ConfigError("config: mass_over_critical needs a two-dimensional volume_filling model");
    s.mass = in.num("mass_over_critical", 1.0) * 8.0 * std::numbers::pi * (1.0 + c.sim.model.gamma());
  } else {
    s.mass = in.num("mass", s.mass);
  }
  s.sigma = in.num("sigma", s.sigma);
  s.floor = in.num("floor", s.floor);
  s.A = in.num("A", s.A);
  s.target_energy = in.num("target_energy", s.target_energy);
  s.k_start = in.num("k_start", s.k_start);
  if (in.has("lambda")) s.lambda = in.num("lambda", 1.0);

  const Section sw(root, "sweep", {"mass_multipliers", "supercritical_targets", "p_range", "q_range",
                                   "empirical_points", "empirical_t_end", "gammas", "m_over",
                                   "k_values", "quad_points", "d_values", "stationary_M",
                                   "stationary_starts"});
  SweepBlock& b = c.sweep;
  b.mass_multipliers = sw.list("mass_multipliers");
  for (const auto& item : split(sw.str("supercritical_targets", ""), ',')) {
    const auto kv = split(item, ':');
    if (kv.size() != 2) throw ConfigError("config: supercritical_targets expects multiplier:target pairs");
    b.supercritical_targets[to_double("sweep.supercritical_targets", kv[0])] =
        to_double("sweep.supercritical_targets", kv[1]);
  }
  if (sw.has("p_range")) b.p_range = to_range("sweep.p_range", sw.str("p_range", ""));
  if (sw.has("q_range")) b.q_range = to_range("sweep.q_range", sw.str("q_range", ""));
  for (const auto& item : split(sw.str("empirical_points", ""), ';')) {
    std::istringstream ps(item);
    double p, q;
    std::string rest;
    if (!(ps >> p >> q) || (ps >> rest))
      throw ConfigError("config: empirical_points expects 'p q; p q; ...'");
    b.empirical_points.emplace_back(p, q);
  }
  b.empirical_t_end = sw.num("empirical_t_end", b.empirical_t_end);
  b.gammas = sw.list("gammas");
  b.m_over = sw.list("m_over");
  for (double k : sw.list("k_values")) {
    if (k != std::floor(k) || k < 1) throw ConfigError("config: sweep.k_values must be positive integers");
    b.k_values.push_back(int(k));
  }
  b.quad_points = int(sw.integer("quad_points", b.quad_points));
  b.d_values = sw.list("d_values");
  b.stationary_M = int(sw.integer("stationary_M", b.stationary_M));
  b.stationary_starts = int(sw.integer("stationary_starts", b.stationary_starts));

  const Section ou(root, "output", {"directory", "cadence", "formats", "checkpoint", "lp_exponents"});
  c.output.directory = ou.str("directory", c.output.directory);
  c.sim.output_dt = ou.num("cadence", c.sim.output_dt);
  if (ou.has("formats")) {
    c.output.csv = c.output.json = c.output.svg = false;
    for (const auto& f : split(ou.str("formats", ""), ',')) {
      if (f == "csv") c.output.csv = true;
      else if (f == "json") c.output.json = true;
      else if (f == "svg") c.output.svg = true;
      else throw ConfigError("config: unknown output format '" + f + "'");
    }
  }
  c.output.checkpoint = ou.flag("checkpoint", false);
  c.sim.lp_exponents = ou.list("lp_exponents");

  // typed validation of the combined configuration
  if (c.experiment == Experiment::Single || c.experiment == Experiment::CriticalMassSweep ||
      c.experiment == Experiment::PhaseDiagram) {
    SimConfig probe = c.sim;
    probe.checkpoint_every = 0;
    validate(probe);
  }
  switch (c.experiment) {
    case Experiment::CriticalMassSweep:
      if (b.mass_multipliers.empty()) throw ConfigError("config: critical_mass_sweep needs sweep.mass_multipliers");
      if (c.sim.n != 2 || c.sim.model.kind() != ModelKind::VolumeFilling)
        throw ConfigError("config: critical_mass_sweep needs n = 2 and a volume_filling model");
      for (double x : b.mass_multipliers)
        if (!(x > 0.0)) throw ConfigError("config: mass multipliers must be positive");
      break;
    case Experiment::PhaseDiagram:
      if (!b.p_range || !b.q_range) throw ConfigError("config: phase_diagram needs sweep.p_range and sweep.q_range");
      if (!(b.empirical_t_end > 0.0)) throw ConfigError("config: sweep.empirical_t_end must be positive");
      break;
    case Experiment::StruweSweep:
      if (b.gammas.empty() || b.m_over.empty() || b.k_values.size() < 2)
        throw ConfigError("config: struwe_sweep needs sweep.gammas, sweep.m_over and two or more k_values");
      for (double g : b.gammas)
        if (!(g > 0.0)) throw ConfigError("config: sweep.gammas must be positive");
      if (b.quad_points < 20) throw ConfigError("config: sweep.quad_points must be >= 20");
      break;
    case Experiment::StationaryScan:
      if (b.d_values.empty()) throw ConfigError("config: stationary_scan needs sweep.d_values");
      if (b.stationary_M < 8 || b.stationary_starts < 4)
        throw ConfigError("config: stationary_M >= 8 and stationary_starts >= 4 required");
      break;
    case Experiment::Single:
      break;
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[experiment]\n"
    << "type = " << to_string(c.experiment) << "\n"
    << "name = " << c.name << "\n"
    << "workers = " << c.workers << "\n"
    << "seed = " << c.seed << "\n"
    << "strict = " << (c.strict ? "true" : "false") << "\n"
    << "require_verdict = " << (c.require_verdict ? "true" : "false") << "\n\n";

  const NonlinearityModel& m = c.sim.model;
  o << "[model]\n";
  if (m.kind() == ModelKind::VolumeFilling) {
    o << "kind = volume_filling\ngamma = " << fmt(m.gamma()) << "\n";
  } else if (m.kind() == ModelKind::PowerType) {
    o << "kind = power\np = " << fmt(m.p()) << "\nq = " << fmt(m.q()) << "\n";
  } else {
    throw ConfigError("config: custom models cannot be serialized");
  }
  o << "s0 = " << fmt(m.s0()) << "\n\n";

  o << "[grid]\n"
    << "n = " << c.sim.n << "\nR = " << fmt(c.sim.R) << "\nM = " << c.sim.M
    << "\nstretch = " << fmt(c.sim.stretch) << "\n\n";

  o << "[time]\n"
    << "t_end = " << fmt(c.sim.t_end) << "\n"
    << "dt_init = " << fmt(c.sim.dt_init) << "\n"
    << "dt_min = " << fmt(c.sim.dt_min) << "\n"
    << "dt_max = " << fmt(c.sim.dt_max) << "\n"
    << "cfl = " << fmt(c.sim.cfl_safety) << "\n"
    << "scheme = " << (c.sim.scheme == FaceScheme::Upwind ? "upwind" : "central") << "\n"
    << "blowup_threshold = " << fmt(c.sim.blowup_threshold) << "\n"
    << "blowup_factor = " << fmt(c.sim.blowup_factor) << "\n"
    << "max_steps = " << c.sim.max_steps << "\n"
    << "stagnation_steps = " << c.sim.stagnation_steps << "\n"
    << "checkpoint_every = " << c.sim.checkpoint_every << "\n";
  if (!c.sim.restart_path.empty()) o << "restart = " << c.sim.restart_path << "\n";
  o << "\n";

  const InitialDataSpec& s = c.sim.initial;
  o << "[initial]\n"
    << "family = " << family_name(s.family) << "\n"
    << "c = " << fmt(s.c) << "\nmass = " << fmt(s.mass) << "\nsigma = " << fmt(s.sigma)
    << "\nfloor = " << fmt(s.floor) << "\nA = " << fmt(s.A)
    << "\ntarget_energy = " << fmt(s.target_energy) << "\nk_start = " << fmt(s.k_start) << "\n";
  if (s.lambda) o << "lambda = " << fmt(*s.lambda) << "\n";
  o << "\n";

  const SweepBlock& b = c.sweep;
  o << "[sweep]\n";
  if (!b.mass_multipliers.empty()) o << "mass_multipliers = " << join(b.mass_multipliers) << "\n";
  if (!b.supercritical_targets.empty()) {
    o << "supercritical_targets = ";
    bool first = true;
    for (const auto& [k, v] : b.supercritical_targets) {
      o << (first ? "" : ", ") << fmt(k) << ":" << fmt(v);
      first = false;
    }
    o << "\n";
  }
  if (b.p_range) o << "p_range = " << fmt(b.p_range->start) << ":" << fmt(b.p_range->stop) << ":" << b.p_range->count << "\n";
  if (b.q_range) o << "q_range = " << fmt(b.q_range->start) << ":" << fmt(b.q_range->stop) << ":" << b.q_range->count << "\n";
  if (!b.empirical_points.empty()) {
    o << "empirical_points = ";
    for (std::size_t i = 0; i < b.empirical_points.size(); ++i)
      o << (i ? "; " : "") << fmt(b.empirical_points[i].first) << " " << fmt(b.empirical_points[i].second);
    o << "\n";
  }
  o << "empirical_t_end = " << fmt(b.empirical_t_end) << "\n";
  if (!b.gammas.empty()) o << "gammas = " << join(b.gammas) << "\n";
  if (!b.m_over.empty()) o << "m_over = " << join(b.m_over) << "\n";
  if (!b.k_values.empty()) o << "k_values = " << join(b.k_values) << "\n";
  o << "quad_points = " << b.quad_points << "\n";
  if (!b.d_values.empty()) o << "d_values = " << join(b.d_values) << "\n";
  o << "stationary_M = " << b.stationary_M << "\nstationary_starts = " << b.stationary_starts << "\n\n";

  o << "[output]\n"
    << "directory = " << c.output.directory << "\n"
    << "cadence = " << fmt(c.sim.output_dt) << "\n";
  std::vector<std::string> formats;
  if (c.output.csv) formats.push_back("csv");
  if (c.output.json) formats.push_back("json");
  if (c.output.svg) formats.push_back("svg");
  o << "formats = ";
  for (std::size_t i = 0; i < formats.size(); ++i) o << (i ? "," : "") << formats[i];
  o << "\ncheckpoint = " << (c.output.checkpoint ? "true" : "false") << "\n";
  if (!c.sim.lp_exponents.empty()) o << "lp_exponents = " << join(c.sim.lp_exponents) << "\n";
  return o.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace chemolab

#include "chemolab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "chemolab/errors.hpp"
#include "chemolab/stationary.hpp"

#ifndef CHEMOLAB_VERSION
#define CHEMOLAB_VERSION "0.0.0"
#endif

namespace chemolab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string code_version() { return CHEMOLAB_VERSION; }

namespace {

std::string num(double x, int digits = 6) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string tstar(const std::optional<double>& t) { return t ? num(*t) : "-"; }

std::string exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

// Each task fills its own slot; nothing else is shared between workers.
void run_pool(std::size_t tasks, int workers, const std::function<void(std::size_t)>& body) {
  std::size_t n = workers > 0 ? std::size_t(workers)
                              : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  n = std::min(n, tasks);
  if (n <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

// Runs one task and converts any library error into an error row.
template <class Fn>
ReportRow isolated(Fn&& fn, std::map<std::string, std::string> identity) {
  try {
    return fn();
  } catch (const std::exception& e) {
    ReportRow row;
    row.fields = std::move(identity);
    row.error = e.what();
    return row;
  }
}

struct RunSummary {
  double max_sup = 0.0;
  double min_F = std::numeric_limits<double>::infinity();
  double first_quarter_sup = 0.0;
  double final_quarter_sup = 0.0;
};

RunSummary summarize(const RunResult& r) {
  RunSummary s;
  const auto& h = r.history;
  if (h.empty()) return s;
  const double t0 = h.front().t, t1 = h.back().t;
  const double q1 = t0 + 0.25 * (t1 - t0), q3 = t0 + 0.75 * (t1 - t0);
  for (const auto& rec : h) {
    s.max_sup = std::max(s.max_sup, rec.sup_u);
    s.min_F = std::min(s.min_F, rec.F);
    if (rec.t <= q1) s.first_quarter_sup = std::max(s.first_quarter_sup, rec.sup_u);
    if (rec.t >= q3) s.final_quarter_sup = std::max(s.final_quarter_sup, rec.sup_u);
  }
  return s;
}

json verdict_json(const RunResult& r) {
  json j;
  j["status"] = to_string(r.verdict.status);
  j["t_star_estimate"] = r.verdict.t_star_estimate ? json(*r.verdict.t_star_estimate) : json(nullptr);
  j["power_law_rms"] = std::isfinite(r.verdict.power_law_rms) ? json(r.verdict.power_law_rms) : json(nullptr);
  j["poly_log_rms"] = std::isfinite(r.verdict.poly_log_rms) ? json(r.verdict.poly_log_rms) : json(nullptr);
  j["kappa"] = r.verdict.kappa;
  j["threshold_crossed"] = r.verdict.threshold_crossed;
  j["dt_collapsed"] = r.verdict.dt_collapsed;
  j["note"] = r.verdict.note;
  j["stop"] = to_string(r.stop);
  j["steps"] = r.steps;
  j["rejected"] = r.rejected;
  j["sup_initial"] = r.sup_initial;
  j["mass_initial"] = r.mass_initial;
  j["max_mass_drift"] = r.max_mass_drift;
  j["min_dt"] = r.min_dt;
  j["t_final"] = r.final_state.t;
  return j;
}

// Writes the artifacts of one solver run into dir/stem.*; returns their paths.
std::vector<std::string> write_run(const fs::path& dir, const std::string& stem, const RunResult& r,
                                   const SimConfig& sim, const OutputBlock& out) {
  std::vector<std::string> paths;
  const std::vector<double> exps = sim.lp_exponents.empty() ? default_exponents(sim.model) : sim.lp_exponents;
  // The diagnostics table is always written: it is what report rows trace to.
  {
    std::string csv = csv_header(exps) + "\n";
    for (const auto& rec : r.history) csv += csv_row(rec) + "\n";
    const fs::path p = dir / (stem + "_diagnostics.csv");
    write_file(p, csv);
    paths.push_back(p.string());
  }
  if (out.csv) {
    std::string csv = "r,u,v\n";
    for (int i = 0; i < r.grid.M; ++i)
      csv += exact(r.grid.centers[i]) + "," + exact(r.final_state.u[i]) + "," + exact(r.final_state.v[i]) + "\n";
    const fs::path p = dir / (stem + "_final_state.csv");
    write_file(p, csv);
    paths.push_back(p.string());
  }
  if (out.json) {
    const fs::path p = dir / (stem + "_verdict.json");
    write_file(p, verdict_json(r).dump(2) + "\n");
    paths.push_back(p.string());
  }
  if (out.checkpoint) {
    const fs::path p = dir / (stem + "_final.ckpt");
    write_checkpoint(p.string(), final_checkpoint(sim, r));
    paths.push_back(p.string());
  }
  if (out.svg && !r.history.empty()) {
    SvgSeries F{"F", {}, {}}, S{"sup u", {}, {}};
    for (const auto& rec : r.history) {
      F.x.push_back(rec.t);
      F.y.push_back(rec.F);
      S.x.push_back(rec.t);
      S.y.push_back(rec.sup_u);
    }
    const fs::path pf = dir / (stem + "_F.svg");
    write_file(pf, svg_line_plot(stem + ": F(t)", "t", "F", {F}));
    const fs::path ps = dir / (stem + "_sup.svg");
    write_file(ps, svg_line_plot(stem + ": sup u(t)", "t", "sup u", {S}, true));
    paths.push_back(pf.string());
    paths.push_back(ps.string());
  }
  return paths;
}

std::string tag(double x) {
  std::string s = num(x, 6);
  for (char& ch : s)
    if (ch == '-') ch = 'm';
    else if (ch == '.') ch = 'p';
    else if (ch == '+') ch = '_';
  return s;
}

bool unbounded(BlowupStatus s) {
  return s == BlowupStatus::SuspectedFiniteTimeBlowup || s == BlowupStatus::SuspectedInfiniteTimeGrowth;
}

void single(const RunConfig& c, const fs::path& dir, ExperimentReport& rep) {
  rep.columns = {"verdict", "stop", "t_final", "steps", "sup_initial", "max_sup", "min_F",
                 "t_star_estimate", "max_mass_drift"};
  ReportRow row = isolated(
      [&] {
        RunResult r = run(c.sim);
        const RunSummary s = summarize(r);
        ReportRow out;
        out.fields = {{"verdict", to_string(r.verdict.status)},
                      {"stop", to_string(r.stop)},
                      {"t_final", num(r.final_state.t)},
                      {"steps", std::to_string(r.steps)},
                      {"sup_initial", num(r.sup_initial)},
                      {"max_sup", num(s.max_sup)},
                      {"min_F", num(s.min_F)},
                      {"t_star_estimate", tstar(r.verdict.t_star_estimate)},
                      {"max_mass_drift", num(r.max_mass_drift, 3)}};
        out.artifacts = write_run(dir, "run", r, c.sim, c.output);
        return out;
      },
      {});
  if (row.fields.count("verdict") && row.fields["verdict"] == "Inconclusive") rep.inconclusive = true;
  rep.rows.push_back(std::move(row));
}

void critical_mass(const RunConfig& c, const fs::path& dir, ExperimentReport& rep) {
  const double gamma = c.sim.model.gamma();
  const double critical = 8.0 * std::numbers::pi * (1.0 + gamma);
  rep.columns = {"multiplier", "mass", "verdict", "max_sup", "sup_ratio", "t_star_estimate",
                 "min_F", "stop", "expected", "consistent"};
  const auto& mults = c.sweep.mass_multipliers;
  std::vector<ReportRow> rows(mults.size());
  std::vector<int> status(mults.size(), -1);
  run_pool(mults.size(), c.workers, [&](std::size_t i) {
    const double x = mults[i];
    const std::map<std::string, std::string> id = {{"multiplier", num(x)}, {"mass", num(x * critical)}};
    if (std::abs(x - 1.0) < 1e-12) {
      ReportRow row;
      row.fields = id;
      row.fields["verdict"] = "-";
      row.fields["expected"] = "critical - excluded by theory";
      rows[i] = row;
      return;
    }
    rows[i] = isolated(
        [&] {
          SimConfig sim = c.sim;
          sim.initial.mass = x * critical;
          if (x < 1.0) {
            if (sim.initial.family == InitialFamily::EnergyTargetedBump)
              sim.initial.family = InitialFamily::GaussianBump;
          } else {
            sim.initial.family = InitialFamily::EnergyTargetedBump;
            auto it = c.sweep.supercritical_targets.find(x);
            if (it != c.sweep.supercritical_targets.end()) sim.initial.target_energy = it->second;
          }
          RunResult r = run(sim);
          const RunSummary s = summarize(r);
          status[i] = int(r.verdict.status);
          const bool ok = x < 1.0 ? r.verdict.status == BlowupStatus::Bounded : unbounded(r.verdict.status);
          ReportRow row;
          row.fields = id;
          row.fields["verdict"] = to_string(r.verdict.status);
          row.fields["max_sup"] = num(s.max_sup);
          row.fields["sup_ratio"] = num(s.max_sup / r.sup_initial);
          row.fields["t_star_estimate"] = tstar(r.verdict.t_star_estimate);
          row.fields["min_F"] = num(s.min_F);
          row.fields["stop"] = to_string(r.stop);
          row.fields["expected"] = x < 1.0 ? "Bounded" : "unbounded";
          row.fields["consistent"] = ok ? "yes" : "no";
          row.artifacts = write_run(dir, "mass_" + tag(x), r, sim, c.output);
          return row;
        },
        id);
  });

  double below = 0.0, above = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mults.size(); ++i) {
    ReportRow& row = rows[i];
    if (status[i] < 0) {
      if (!row.error.empty()) rep.warnings.push_back("multiplier " + num(mults[i]) + ": " + row.error);
      rep.rows.push_back(row);
      continue;
    }
    const auto st = BlowupStatus(status[i]);
    if (st == BlowupStatus::Bounded) below = std::max(below, mults[i]);
    if (unbounded(st)) above = std::min(above, mults[i]);
    if (st == BlowupStatus::Inconclusive) rep.inconclusive = true;
    if (row.fields["consistent"] == "no") {
      rep.contradiction = true;
      rep.warnings.push_back("multiplier " + num(mults[i]) + ": verdict " + row.fields["verdict"] +
                             " differs from the expected " + row.fields["expected"]);
    }
    rep.rows.push_back(row);
  }
  rep.summary.push_back("critical mass 8 pi (1 + gamma) = " + num(critical, 10));
  if (below > 0.0 && std::isfinite(above)) {
    const bool brackets = below < 1.0 && 1.0 < above;
    rep.summary.push_back("empirical transition between multipliers " + num(below) + " and " + num(above) +
                          (brackets ? " (brackets the critical mass)" : " (does not bracket the critical mass)"));
    if (!brackets) rep.contradiction = true;
  } else {
    rep.summary.push_back("no transition observed within the sweep");
  }
  rep.summary.push_back("unbounded rows count as consistent whether growth looks finite- or infinite-time");
}

void phase_diagram(const RunConfig& c, const fs::path& dir, ExperimentReport& rep) {
  const int n = c.sim.n;
  const auto ps = c.sweep.p_range->values();
  const auto qs = c.sweep.q_range->values();
  rep.columns = {"p", "q", "n", "region", "basis", "empirical", "consistent"};

  // region map, q increasing upwards
  auto glyph = [](Region r) {
    switch (r) {
      case Region::GlobalExistence: return 'G';
      case Region::GlobalWithInfiniteTimeBlowupExamples: return 'I';
      case Region::FiniteTimeBlowup: return 'F';
      case Region::OpenGap: return '?';
      case Region::NotCovered: return '.';
    }
    return '.';
  };
  std::string csv = "p,q,n,region,basis\n";
  std::vector<std::string> lines;
  for (auto qi = qs.rbegin(); qi != qs.rend(); ++qi) {
    std::string line = num(*qi, 4);
    line.resize(8, ' ');
    line += "| ";
    for (double p : ps) {
      const RegimeVerdict v = classify_power(p, *qi, n);
      line += glyph(v.region);
      csv += exact(p) + "," + exact(*qi) + "," + std::to_string(n) + "," + to_string(v.region) + ",\"" + v.basis + "\"\n";
    }
    lines.push_back(line);
  }
  const fs::path map_path = dir / "region_map.csv";
  write_file(map_path, csv);
  rep.summary.push_back("region map (rows: q descending; columns: p from " + num(ps.front()) + " to " +
                        num(ps.back()) + "; n = " + std::to_string(n) + ")");
  for (auto& l : lines) rep.summary.push_back(l);
  rep.summary.push_back("legend: G global existence, I infinite-time examples, F finite-time blowup, ? open gap, . not covered");

  for (double q : qs)
    for (double p : ps) {
      const RegimeVerdict v = classify_power(p, q, n);
      ReportRow row;
      row.fields = {{"p", num(p)}, {"q", num(q)}, {"n", std::to_string(n)}, {"region", to_string(v.region)},
                    {"basis", v.basis}, {"empirical", "-"}, {"consistent", "-"}};
      row.artifacts = {map_path.string()};
      rep.rows.push_back(row);
    }

  const auto& pts = c.sweep.empirical_points;
  std::vector<ReportRow> rows(pts.size());
  std::vector<int> status(pts.size(), -1);
  run_pool(pts.size(), c.workers, [&](std::size_t i) {
    const auto [p, q] = pts[i];
    const RegimeVerdict v = classify_power(p, q, n);
    std::map<std::string, std::string> id = {{"p", num(p)}, {"q", num(q)}, {"n", std::to_string(n)},
                                             {"region", to_string(v.region)}, {"basis", v.basis}};
    rows[i] = isolated(
        [&] {
          SimConfig sim = c.sim;
          sim.model = NonlinearityModel::power_type(p, q, c.sim.model.s0());
          sim.t_end = c.sweep.empirical_t_end;
          RunResult r = run(sim);
          status[i] = int(r.verdict.status);
          const bool contradicts = v.region == Region::GlobalExistence && unbounded(r.verdict.status);
          ReportRow row;
          row.fields = id;
          row.fields["empirical"] = to_string(r.verdict.status);
          row.fields["consistent"] = contradicts ? "no" : "yes";
          row.artifacts = write_run(dir, "point_p" + tag(p) + "_q" + tag(q), r, sim, c.output);
          return row;
        },
        id);
  });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!rows[i].error.empty()) rep.warnings.push_back("point " + rows[i].fields["p"] + "," + rows[i].fields["q"] + ": " + rows[i].error);
    if (status[i] == int(BlowupStatus::Inconclusive)) rep.inconclusive = true;
    if (rows[i].fields["consistent"] == "no") {
      rep.contradiction = true;
      rep.warnings.push_back("point " + rows[i].fields["p"] + "," + rows[i].fields["q"] +
                             ": growth observed in a global-existence region (possibly under-resolved)");
    }
    rep.rows.push_back(rows[i]);
  }
}

void struwe(const RunConfig& c, const fs::path& dir, ExperimentReport& rep) {
  rep.columns = {"gamma", "m_over", "mass", "fitted_slope", "predicted_slope", "relative_error", "slope_over_pi"};
  std::vector<std::pair<double, double>> jobs;
  for (double g : c.sweep.gammas)
    for (double mo : c.sweep.m_over) jobs.emplace_back(g, mo);
  std::vector<ReportRow> rows(jobs.size());
  run_pool(jobs.size(), c.workers, [&](std::size_t i) {
    const auto [g, mo] = jobs[i];
    const double m = mo * 8.0 * std::numbers::pi * (1.0 + g);
    rows[i] = isolated(
        [&] {
          const StruweResult s = struwe_sweep(g, m, c.sim.R, c.sweep.k_values, c.sweep.quad_points);
          ReportRow row;
          row.fields = {{"gamma", num(g)}, {"m_over", num(mo)}, {"mass", num(m)},
                        {"fitted_slope", num(s.fitted_slope, 8)}, {"predicted_slope", num(s.predicted_slope, 8)},
                        {"relative_error", s.predicted_slope != 0.0
                                               ? num(std::abs(s.fitted_slope / s.predicted_slope - 1.0), 3)
                                               : "-"},
                        {"slope_over_pi", num(s.fitted_slope / std::numbers::pi, 6)}};
          const std::string stem = "struwe_g" + tag(g) + "_m" + tag(mo);
          const fs::path p = dir / (stem + ".csv");
          write_file(p, struwe_csv(s));
          row.artifacts.push_back(p.string());
          if (c.output.svg) {
            SvgSeries data{"F(z_k)", {}, s.F_values}, fit{"fit", {}, {}, true};
            for (int k : s.k_values) data.x.push_back(std::log(double(k)));
            double mx = 0.0, my = 0.0;
            for (std::size_t j = 0; j < data.x.size(); ++j) {
              mx += data.x[j];
              my += data.y[j];
            }
            mx /= double(data.x.size());
            my /= double(data.y.size());
            for (double x : data.x) {
              fit.x.push_back(x);
              fit.y.push_back(my + s.fitted_slope * (x - mx));
            }
            const fs::path sp = dir / (stem + ".svg");
            write_file(sp, svg_line_plot(stem + ": energy against ln k", "ln k", "F", {data, fit}));
            row.artifacts.push_back(sp.string());
          }
          return row;
        },
        {{"gamma", num(g)}, {"m_over", num(mo)}, {"mass", num(m)}});
  });
  for (auto& r : rows) {
    if (!r.error.empty()) rep.warnings.push_back("struwe row: " + r.error);
    rep.rows.push_back(r);
  }
}

void stationary_scan(const RunConfig& c, const fs::path& dir, ExperimentReport& rep) {
  rep.columns = {"d",        "branch", "v0",       "mass",  "F", "neumann_residual", "pohozaev_residual",
                 "constant", "resolved"};
  // Branches whose Pohozaev residual exceeds this are concentrated beyond what
  // the grid resolves; they are listed but left out of the energy minimum.
  constexpr double kResolvedPohozaev = 1e-6;
  const auto& ds = c.sweep.d_values;
  std::vector<std::vector<ReportRow>> rows(ds.size());
  run_pool(ds.size(), c.workers, [&](std::size_t i) {
    const double d = ds[i];
    try {
      StationaryOptions opt;
      opt.M = c.sweep.stationary_M;
      opt.starts = c.sweep.stationary_starts;
      const auto profiles = find_stationary(c.sim.model, c.sim.R, StationaryTarget::with_d(d), opt);
      for (std::size_t b = 0; b < profiles.size(); ++b) {
        const StationaryProfile& pr = profiles[b];
        ReportRow row;
        row.fields = {{"d", num(d)}, {"branch", std::to_string(b)}, {"v0", num(pr.shoot_v0, 12)},
                      {"mass", num(pr.m, 10)}, {"F", num(pr.F_value, 10)},
                      {"neumann_residual", num(pr.neumann_residual, 3)},
                      {"pohozaev_residual", num(pr.pohozaev_residual, 3)},
                      {"constant", pr.constant ? "yes" : "no"},
                      {"resolved", pr.pohozaev_residual <= kResolvedPohozaev ? "yes" : "no"}};
        const std::string stem = "stationary_d" + tag(d) + "_b" + std::to_string(b);
        const fs::path p = dir / (stem + ".csv");
        write_file(p, profile_csv(pr));
        row.artifacts.push_back(p.string());
        if (c.output.json) {
          const fs::path jp = dir / (stem + ".json");
          write_file(jp, profile_json(pr) + "\n");
          row.artifacts.push_back(jp.string());
        }
        rows[i].push_back(row);
      }
    } catch (const std::exception& e) {
      ReportRow row;
      row.fields = {{"d", num(d)}};
      row.error = e.what();
      rows[i].push_back(row);
    }
  });
  double min_F = std::numeric_limits<double>::infinity();
  for (auto& group : rows)
    for (auto& r : group) {
      if (!r.error.empty()) {
        rep.warnings.push_back("d = " + r.fields["d"] + ": " + r.error);
      } else if (r.fields["resolved"] == "yes") {
        min_F = std::min(min_F, std::stod(r.fields["F"]));
      } else {
        rep.warnings.push_back("d = " + r.fields["d"] + ", branch " + r.fields["branch"] +
                               ": Pohozaev residual " + r.fields["pohozaev_residual"] +
                               " - not resolved on this grid");
      }
      rep.rows.push_back(r);
    }
  if (std::isfinite(min_F)) rep.summary.push_back("lowest energy over resolved stationary branches: " + num(min_F, 10));
}

}  // namespace

ExperimentReport run_experiment(const RunConfig& config, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  ExperimentReport rep;
  rep.experiment = to_string(config.experiment);
  rep.name = config.name;
  rep.config_hash = hex64(config_hash(config));
  rep.code_version = code_version();
  rep.directory = dir.string();
  write_file(dir / "config.ini", serialize_config(config));

  switch (config.experiment) {
    case Experiment::Single: single(config, dir, rep); break;
    case Experiment::CriticalMassSweep: critical_mass(config, dir, rep); break;
    case Experiment::PhaseDiagram: phase_diagram(config, dir, rep); break;
    case Experiment::StruweSweep: struwe(config, dir, rep); break;
    case Experiment::StationaryScan: stationary_scan(config, dir, rep); break;
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file(dir / "report.json", report_json(rep) + "\n");
  write_file(dir / "report.txt", report_text(rep));
  return rep;
}

std::string report_json(const ExperimentReport& r) {
  json j;
  j["experiment"] = r.experiment;
  j["name"] = r.name;
  j["columns"] = r.columns;
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    json jr;
    jr["fields"] = row.fields;
    jr["artifacts"] = row.artifacts;
    if (!row.error.empty()) jr["error"] = row.error;
    j["rows"].push_back(jr);
  }
  j["warnings"] = r.warnings;
  j["summary"] = r.summary;
  j["provenance"] = {{"config_hash", r.config_hash},
                     {"code_version", r.code_version},
                     {"wall_seconds", r.wall_seconds},
                     {"directory", r.directory}};
  j["contradiction"] = r.contradiction;
  j["inconclusive"] = r.inconclusive;
  return j.dump(2);
}

ExperimentReport report_from_json(const std::string& text) {
  ExperimentReport r;
  try {
    const json j = json::parse(text);
    r.experiment = j.at("experiment").get<std::string>();
    r.name = j.value("name", "");
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& jr : j.at("rows")) {
      ReportRow row;
      row.fields = jr.at("fields").get<std::map<std::string, std::string>>();
      row.artifacts = jr.value("artifacts", std::vector<std::string>{});
      row.error = jr.value("error", "");
      r.rows.push_back(row);
    }
    r.warnings = j.value("warnings", std::vector<std::string>{});
    r.summary = j.value("summary", std::vector<std::string>{});
    const json& p = j.at("provenance");
    r.config_hash = p.value("config_hash", "");
    r.code_version = p.value("code_version", "");
    r.wall_seconds = p.value("wall_seconds", 0.0);
    r.directory = p.value("directory", "");
    r.contradiction = j.value("contradiction", false);
    r.inconclusive = j.value("inconclusive", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: malformed JSON: ") + e.what());
  }
  return r;
}

std::string report_text(const ExperimentReport& r) {
  std::ostringstream o;
  o << "experiment: " << r.experiment << " (" << r.name << ")\n"
    << "config hash: " << r.config_hash << "  version: " << r.code_version
    << "  wall time: " << num(r.wall_seconds, 4) << " s\n\n";
  std::vector<std::string> cols = r.columns;
  const bool any_error = std::any_of(r.rows.begin(), r.rows.end(), [](const ReportRow& x) { return !x.error.empty(); });
  if (any_error) cols.push_back("error");
  std::vector<std::size_t> width(cols.size());
  auto cell = [&](const ReportRow& row, std::size_t c) -> std::string {
    if (cols[c] == "error") return row.error;
    auto it = row.fields.find(cols[c]);
    return it == row.fields.end() ? "" : it->second;
  };
  for (std::size_t c = 0; c < cols.size(); ++c) {
    width[c] = cols[c].size();
    for (const auto& row : r.rows) width[c] = std::max(width[c], cell(row, c).size());
  }
  auto line = [&](auto get) {
    std::string s;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      std::string v = get(c);
      v.resize(width[c], ' ');
      s += (c ? "  " : "") + v;
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s + "\n";
  };
  o << line([&](std::size_t c) { return cols[c]; });
  o << line([&](std::size_t c) { return std::string(width[c], '-'); });
  for (const auto& row : r.rows) o << line([&](std::size_t c) { return cell(row, c); });
  if (!r.summary.empty()) {
    o << "\n";
    for (const auto& s : r.summary) o << s << "\n";
  }
  if (!r.warnings.empty()) {
    o << "\nwarnings:\n";
    for (const auto& w : r.warnings) o << "  - " << w << "\n";
  }
  return o.str();
}

std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<SvgSeries>& series, bool log_y) {
  const double W = 640, H = 400, L = 70, Rm = 20, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (W - L - Rm) * (x - x0) / (x1 - x0); };
  auto py = [&](double y) { return H - B - (H - T - B) * (ty(y) - y0) / (y1 - y0); };
  auto esc = [](const std::string& s) {
    std::string o;
    for (char ch : s) {
      if (ch == '<') o += "&lt;";
      else if (ch == '>') o += "&gt;";
      else if (ch == '&') o += "&amp;";
      else o += ch;
    }
    return o;
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << esc(title) << "</text>\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - Rm << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
    << "<text x=\"" << (L + W - Rm) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << esc(xlabel) << "</text>\n"
    << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << (T + H - B) / 2
    << ")\" text-anchor=\"middle\">" << esc(ylabel) << (log_y ? " (log10)" : "") << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"10\">" << num(xv, 3) << "</text>\n";
    const double ypix = H - B - (H - T - B) * k / 4.0;
    o << "<text x=\"" << L - 6 << "\" y=\"" << ypix + 3 << "\" text-anchor=\"end\" font-size=\"10\">" << num(yv, 3) << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    o << "<polyline fill=\"none\" stroke=\"" << colors[s % 4] << "\" stroke-width=\"1.5\""
      << (ser.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      o << num(px(ser.x[i]), 6) << "," << num(py(ser.y[i]), 6) << " ";
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - Rm - 4 << "\" y=\"" << T + 14 * (s + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
      << colors[s % 4] << "\">" << esc(ser.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace chemolab

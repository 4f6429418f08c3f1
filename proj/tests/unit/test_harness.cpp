#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "chemolab/errors.hpp"
#include "chemolab/harness.hpp"

using namespace chemolab;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const char* kSweepText = R"(
# critical mass sweep on the unit disc
[experiment]
type = critical_mass_sweep
name = disc
workers = 1

[model]
kind = volume_filling
gamma = 1

[grid]
n = 2
R = 1
M = 64

[time]
t_end = 0.5
blowup_factor = 1000

[initial]
family = gaussian
mass = 10
sigma = 0.25

[sweep]
mass_multipliers = 0.5, 1.0, 1.5
supercritical_targets = 1.5:-1e9

[output]
directory = out
cadence = 0.1
formats = csv, json
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chemolab_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("configuration text round-trips") {
  const RunConfig c = parse_config(kSweepText);
  CHECK(c.experiment == Experiment::CriticalMassSweep);
  CHECK(c.sim.M == 64);
  CHECK(c.sim.model.kind() == ModelKind::VolumeFilling);
  CHECK(c.sweep.mass_multipliers == std::vector<double>{0.5, 1.0, 1.5});
  CHECK(c.sweep.supercritical_targets.at(1.5) == -1e9);
  CHECK_FALSE(c.output.svg);
  const std::string once = serialize_config(c);
  const RunConfig again = parse_config(once);
  CHECK(serialize_config(again) == once);
  CHECK(config_hash(again) == config_hash(c));
  RunConfig other = c;
  other.sim.M = 65;
  CHECK(config_hash(other) != config_hash(c));
  CHECK(hex64(config_hash(c)).size() == 16);
}

TEST_CASE("every experiment type round-trips") {
  const char* text = R"(
[experiment]
type = phase_diagram
strict = true
[model]
kind = power
p = -1
q = 0.1
[grid]
n = 3
M = 32
[initial]
family = energy_targeted
mass = 5
lambda = 2
[sweep]
p_range = -2:1:7
q_range = -1:2:7
empirical_points = -1 0.1; 0 1
empirical_t_end = 2
gammas = 1
m_over = 0.5, 2
k_values = 16, 32
d_values = -20, -30
[output]
lp_exponents = 2, 4
)";
  const RunConfig c = parse_config(text);
  CHECK(c.strict);
  CHECK(c.sweep.p_range->values().size() == 7);
  CHECK(c.sweep.empirical_points.size() == 2);
  CHECK(*c.sim.initial.lambda == 2.0);
  CHECK(serialize_config(parse_config(serialize_config(c))) == serialize_config(c));
  for (const char* kind : {"single", "struwe_sweep", "stationary_scan"}) {
    std::string t = text;
    t.replace(t.find("phase_diagram"), 13, kind);
    const RunConfig k = parse_config(t);
    CHECK(serialize_config(parse_config(serialize_config(k))) == serialize_config(k));
  }
}

TEST_CASE("typed validation of configuration text") {
  CHECK_THROWS_AS(parse_config("[grid]\nM = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\nM = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\ncells = 8\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[gird]\nM = 8\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[model]\nkind = power\np = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\ntype = sideways\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\ntype = critical_mass_sweep\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\nM = 8\nM = 9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sweep]\np_range = 1:2\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/chemolab.cfg"), ConfigError);
  const RunConfig c = parse_config("[initial]\nmass_over_critical = 0.5\n");
  CHECK(c.sim.initial.mass == Approx(8.0 * std::numbers::pi));
}

TEST_CASE("sweep isolates failing rows and flags the critical mass") {
  const fs::path dir = scratch("sweep");
  const RunConfig c = parse_config(kSweepText);
  const ExperimentReport r = run_experiment(c, dir.string());
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].error.empty());
  CHECK(r.rows[1].fields.at("expected") == "critical - excluded by theory");
  CHECK_FALSE(r.rows[2].error.empty());  // unreachable energy target
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "config.ini"));
  for (const auto& row : r.rows)
    for (const auto& a : row.artifacts) CHECK(fs::exists(a));
  CHECK_FALSE(r.rows[0].artifacts.empty());
  CHECK(r.config_hash == hex64(config_hash(c)));

  std::ifstream in(dir / "report.json");
  std::stringstream ss;
  ss << in.rdbuf();
  const ExperimentReport back = report_from_json(ss.str());
  CHECK(back.rows.size() == 3);
  CHECK(back.rows[2].error == r.rows[2].error);
  CHECK(report_text(back) == report_text(r));
  CHECK(report_text(r).find("error") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("struwe and stationary experiments") {
  const fs::path dir = scratch("struwe");
  RunConfig c = parse_config(
      "[experiment]\ntype = struwe_sweep\n[sweep]\ngammas = 1\nm_over = 1, 2\nk_values = 16, 32, 64, 128\n");
  const ExperimentReport r = run_experiment(c, dir.string());
  REQUIRE(r.rows.size() == 2);
  CHECK(std::stod(r.rows[1].fields.at("slope_over_pi")) == Approx(-16.0).epsilon(0.1));
  for (const auto& a : r.rows[1].artifacts) CHECK(fs::exists(a));

  const fs::path sdir = scratch("stationary");
  c = parse_config(
      "[experiment]\ntype = stationary_scan\n[sweep]\nd_values = -0.3068528194400547\nstationary_M = 64\n");
  const ExperimentReport s = run_experiment(c, sdir.string());
  REQUIRE_FALSE(s.rows.empty());
  bool constant = false;
  for (const auto& row : s.rows) constant = constant || row.fields.at("constant") == "yes";
  CHECK(constant);
  fs::remove_all(dir);
  fs::remove_all(sdir);
}

TEST_CASE("phase diagram region map") {
  const fs::path dir = scratch("phase");
  const RunConfig c = parse_config(
      "[experiment]\ntype = phase_diagram\n[model]\nkind = power\np = 0\nq = 1\n[grid]\nn = 3\n"
      "[sweep]\np_range = -2:1:13\nq_range = -1:2:13\n");
  const ExperimentReport r = run_experiment(c, dir.string());
  CHECK(r.rows.size() == 169);
  bool gap = false;
  for (const auto& row : r.rows)
    if (row.fields.at("region") == "OpenGap") {
      gap = true;
      const double q = std::stod(row.fields.at("q"));
      CHECK(q >= 0.0);
      CHECK(q <= 2.0 / 3.0);
    }
  CHECK(gap);
  bool legend = false;
  for (const auto& line : r.summary) legend = legend || line.find('?') != std::string::npos;
  CHECK(legend);
  fs::remove_all(dir);
}

TEST_CASE("svg emitter") {
  const std::string svg = svg_line_plot("t<1", "x", "y", {{"a", {0, 1, 2}, {1, 4, 9}}}, true);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("t&lt;1") != std::string::npos);
}

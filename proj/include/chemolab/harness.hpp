#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chemolab/regime.hpp"
#include "chemolab/simulation.hpp"

namespace chemolab {

enum class Experiment { Single, CriticalMassSweep, PhaseDiagram, StruweSweep, StationaryScan };

std::string to_string(Experiment e);

struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  std::vector<double> values() const;
};

struct SweepBlock {
  std::vector<double> mass_multipliers;         // relative to 8 pi (1 + gamma)
  std::map<double, double> supercritical_targets;  // multiplier -> target energy
  std::optional<Range> p_range, q_range;
  std::vector<std::pair<double, double>> empirical_points;  // (p, q)
  double empirical_t_end = 20.0;
  std::vector<double> gammas;       // Struwe sweeps
  std::vector<double> m_over;       // Struwe masses as multiples of 8 pi (1 + gamma)
  std::vector<int> k_values;
  int quad_points = 64;
  std::vector<double> d_values;     // stationary scans
  int stationary_M = 512;
  int stationary_starts = 240;
};

struct OutputBlock {
  std::string directory = "chemolab_out";
  bool csv = true;
  bool json = true;
  bool svg = true;
  bool checkpoint = false;
};

struct RunConfig {
  Experiment experiment = Experiment::Single;
  std::string name = "experiment";
  int workers = 0;          // 0: hardware concurrency
  std::uint64_t seed = 0;   // recorded for provenance; runs are deterministic
  bool strict = false;
  bool require_verdict = false;
  SimConfig sim;
  SweepBlock sweep;
  OutputBlock output;
};

/// INI-style text: [section] headers and key = value lines, '#' or ';' comments.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// FNV-1a 64-bit hash of the serialized configuration.
std::uint64_t config_hash(const RunConfig& config);
std::string hex64(std::uint64_t x);

struct ReportRow {
  std::map<std::string, std::string> fields;  // column -> formatted value
  std::vector<std::string> artifacts;         // paths written for this row
  std::string error;                          // non-empty when the row failed
};

struct ExperimentReport {
  std::string experiment;
  std::string name;
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
  std::vector<std::string> summary;  // free-form summary lines
  std::string config_hash;
  std::string code_version;
  double wall_seconds = 0.0;
  bool contradiction = false;        // empirical verdict contradicts theory
  bool inconclusive = false;         // at least one row ended Inconclusive
  std::string directory;
};

/// Runs the configured experiment, writing artifacts below out_dir (created
/// if needed) plus report.json and report.txt.
ExperimentReport run_experiment(const RunConfig& config, const std::string& out_dir);

std::string report_json(const ExperimentReport& report);
std::string report_text(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);

/// Minimal static SVG line chart.
struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};
std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<SvgSeries>& series,
                          bool log_y = false);

std::string code_version();

}  // namespace chemolab

// Command-line front end. Talks to the library exclusively through the C API.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chemolab/chemolab.h"

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerics = 3, kInconclusive = 4 };

int exit_code(chemolab_status s) {
  switch (s) {
    case CHEMOLAB_OK: return kOk;
    case CHEMOLAB_INVALID_ARGUMENT:
    case CHEMOLAB_CONFIG_ERROR:
    case CHEMOLAB_MODEL_VIOLATION: return kConfig;
    case CHEMOLAB_INCONCLUSIVE: return kInconclusive;
    default: return kNumerics;
  }
}

int report_failure(chemolab_status s, const std::string& what) {
  std::cerr << "chemolab: " << what << ": " << chemolab_status_name(s);
  const std::string detail = chemolab_last_error();
  if (!detail.empty()) std::cerr << ": " << detail;
  std::cerr << "\n";
  return exit_code(s);
}

// Owns a string returned by the C API.
struct CString {
  char* p = nullptr;
  ~CString() { chemolab_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

std::string output_dir(const std::string& flag, const std::string& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CHEMOLAB_OUT"); env && *env) return env;
  return fallback;
}

bool write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  out << text;
  return bool(out);
}

struct ExperimentArgs {
  std::string config;
  std::string out;
  bool strict = false;
  bool require_verdict = false;
  int workers = -1;
};

int run_experiment(const ExperimentArgs& a, bool sweep_only) {
  chemolab_config* cfg = nullptr;
  chemolab_status s = chemolab_config_load(a.config.c_str(), &cfg);
  if (s != CHEMOLAB_OK) return report_failure(s, "loading " + a.config);
  std::unique_ptr<chemolab_config, void (*)(chemolab_config*)> guard(cfg, chemolab_config_free);

  CString kind;
  chemolab_config_experiment(cfg, &kind.p);
  if (sweep_only && kind.str() == "single") {
    std::cerr << "chemolab: 'sweep' needs a sweep experiment; use 'run' for single runs\n";
    return kConfig;
  }
  if (a.strict) chemolab_config_set_strict(cfg, 1);
  if (a.require_verdict) chemolab_config_set_require_verdict(cfg, 1);
  if (a.workers >= 0) chemolab_config_set_workers(cfg, a.workers);

  CString dir;
  chemolab_config_output_dir(cfg, &dir.p);
  const std::string out = output_dir(a.out, dir.str());

  chemolab_report* rep = nullptr;
  s = chemolab_experiment_run(cfg, out.c_str(), &rep);
  const std::string detail = chemolab_last_error();
  if (rep != nullptr) {
    CString text;
    chemolab_report_text(rep, &text.p);
    std::cout << text.str() << "\nartifacts: " << out << "\n";
    chemolab_report_free(rep);
  }
  if (s != CHEMOLAB_OK) {
    std::cerr << "chemolab: " << chemolab_status_name(s) << (detail.empty() ? "" : ": " + detail) << "\n";
    return exit_code(s);
  }
  return kOk;
}

void add_experiment_options(CLI::App* cmd, ExperimentArgs& a) {
  cmd->add_option("-c,--config", a.config, "experiment configuration file (INI)")->required();
  cmd->add_option("-o,--out", a.out, "output directory (overrides CHEMOLAB_OUT and the config)");
  cmd->add_flag("--strict", a.strict, "exit 4 when an empirical verdict contradicts the theory");
  cmd->add_flag("--require-verdict", a.require_verdict, "exit 4 when any run ends Inconclusive");
  cmd->add_option("-j,--workers", a.workers, "worker threads (0: machine parallelism)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chemolab: radial chemotaxis laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(chemolab_version()));

  ExperimentArgs run_args, sweep_args;
  auto* run_cmd = app.add_subcommand("run", "run the experiment described by a configuration file");
  add_experiment_options(run_cmd, run_args);
  auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep experiment (mass, phase diagram, Struwe, stationary)");
  add_experiment_options(sweep_cmd, sweep_args);

  std::string model = "power";
  double p = 0.0, q = 1.0, gamma = 1.0, mass = -1.0, s0 = 1.0;
  int n = 2;
  bool as_json = false;
  auto* classify_cmd = app.add_subcommand("classify", "place a nonlinearity in the existence/blowup regimes");
  classify_cmd->add_option("--model", model, "power | volume_filling")
      ->check(CLI::IsMember({"power", "volume_filling"}));
  classify_cmd->add_option("--p", p, "diffusion exponent (power model)");
  classify_cmd->add_option("--q", q, "sensitivity exponent (power model)");
  classify_cmd->add_option("--gamma", gamma, "volume-filling exponent");
  classify_cmd->add_option("--n", n, "space dimension")->check(CLI::PositiveNumber);
  classify_cmd->add_option("--mass", mass, "initial mass (volume filling, n = 2)");
  classify_cmd->add_flag("--json", as_json, "print the full JSON verdict");

  std::string st_model = "volume_filling", st_out;
  double st_p = 0.0, st_q = 1.0, st_gamma = 1.0, R = 1.0, d = 0.0, st_mass = 0.0, v0 = 0.0;
  int M = 512;
  auto* stat_cmd = app.add_subcommand("stationary", "solve for a radial stationary state");
  stat_cmd->add_option("--model", st_model, "power | volume_filling")
      ->check(CLI::IsMember({"power", "volume_filling"}));
  stat_cmd->add_option("--p", st_p, "diffusion exponent (power model)");
  stat_cmd->add_option("--q", st_q, "sensitivity exponent (power model)");
  stat_cmd->add_option("--gamma", st_gamma, "volume-filling exponent");
  stat_cmd->add_option("--s0", s0, "reference density of G");
  stat_cmd->add_option("--R", R, "disc radius")->check(CLI::PositiveNumber);
  auto* d_opt = stat_cmd->add_option("--d", d, "offset d in u = Xi^{-1}(v + d)");
  auto* m_opt = stat_cmd->add_option("--mass", st_mass, "target mass instead of d");
  d_opt->excludes(m_opt);
  stat_cmd->add_option("--M", M, "cells")->check(CLI::Range(8, 1 << 20));
  stat_cmd->add_option("--v0", v0, "converge from this central value");
  stat_cmd->add_option("-o,--out", st_out, "directory for profile.csv and profile.json");

  double sw_gamma = 1.0, m_over = 1.0, sw_R = 1.0;
  int kmin = 16, kmax = 1024, quad = 64;
  std::string sw_out;
  auto* struwe_cmd = app.add_subcommand("struwe", "energy of the concentrating sequence against ln k");
  struwe_cmd->add_option("--gamma", sw_gamma, "volume-filling exponent")->check(CLI::PositiveNumber);
  struwe_cmd->add_option("--m-over", m_over, "mass as a multiple of 8 pi (1 + gamma)")->check(CLI::PositiveNumber);
  struwe_cmd->add_option("--R", sw_R, "disc radius")->check(CLI::PositiveNumber);
  struwe_cmd->add_option("--kmin", kmin, "smallest k (doubled up to kmax)")->check(CLI::PositiveNumber);
  struwe_cmd->add_option("--kmax", kmax, "largest k")->check(CLI::PositiveNumber);
  struwe_cmd->add_option("--quad", quad, "Gauss points per decade")->check(CLI::Range(20, 4096));
  struwe_cmd->add_option("-o,--out", sw_out, "also write struwe.csv into this directory");

  std::string report_path;
  auto* report_cmd = app.add_subcommand("report", "render a stored report.json as a table");
  report_cmd->add_option("path", report_path, "report.json or the directory containing it")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  if (*run_cmd) return run_experiment(run_args, false);
  if (*sweep_cmd) return run_experiment(sweep_args, true);

  if (*classify_cmd) {
    CString out;
    chemolab_status s = model == "power" ? chemolab_classify_power(p, q, n, &out.p)
                                         : chemolab_classify_volume_filling(gamma, n, mass, &out.p);
    if (s != CHEMOLAB_OK) return report_failure(s, "classify");
    if (as_json) {
      std::cout << out.str() << "\n";
      return kOk;
    }
    const auto j = nlohmann::json::parse(out.str());
    std::cout << j["region"].get<std::string>() << "  [" << j["basis"].get<std::string>() << "]\n";
    if (!j["note"].get<std::string>().empty()) std::cout << "note: " << j["note"].get<std::string>() << "\n";
    if (!j["mass_threshold_general"].is_null())
      std::cout << "mass thresholds: general " << j["mass_threshold_general"].get<double>() << ", radial "
                << j["mass_threshold_radial"].get<double>() << "\n";
    return kOk;
  }

  if (*stat_cmd) {
    chemolab_model* mdl = nullptr;
    chemolab_status s = st_model == "power" ? chemolab_model_power(st_p, st_q, s0, &mdl)
                                            : chemolab_model_volume_filling(st_gamma, s0, &mdl);
    if (s != CHEMOLAB_OK) return report_failure(s, "model");
    std::unique_ptr<chemolab_model, void (*)(chemolab_model*)> guard(mdl, chemolab_model_free);
    const bool by_mass = m_opt->count() > 0;
    chemolab_stationary_summary sum{};
    CString csv, js;
    s = chemolab_stationary_solve(mdl, R, by_mass ? 1 : 0, by_mass ? st_mass : d, M, v0, &sum, &csv.p, &js.p);
    if (s != CHEMOLAB_OK) return report_failure(s, "stationary");
    std::printf("d = %.12g\nmass = %.12g\nv(0) = %.12g\nF = %.12g\nneumann_residual = %.3g\n"
                "pohozaev_residual = %.3g\nconstant = %s\n",
                sum.d, sum.mass, sum.v0, sum.energy, sum.neumann_residual, sum.pohozaev_residual,
                sum.constant ? "yes" : "no");
    const std::string dir = output_dir(st_out, "");
    if (!dir.empty()) {
      if (!write_text(std::filesystem::path(dir) / "profile.csv", csv.str()) ||
          !write_text(std::filesystem::path(dir) / "profile.json", js.str() + "\n")) {
        std::cerr << "chemolab: cannot write into " << dir << "\n";
        return kConfig;
      }
      std::cout << "artifacts: " << dir << "\n";
    }
    return kOk;
  }

  if (*struwe_cmd) {
    if (kmax < kmin) {
      std::cerr << "chemolab: --kmax must be >= --kmin\n";
      return kConfig;
    }
    std::vector<int> ks;
    for (long k = kmin; k <= kmax; k *= 2) ks.push_back(int(k));
    if (ks.size() < 2) {
      std::cerr << "chemolab: need at least two k values (kmax >= 2 kmin)\n";
      return kConfig;
    }
    const double m = m_over * 8.0 * std::numbers::pi * (1.0 + sw_gamma);
    chemolab_struwe_summary sum{};
    CString csv;
    const chemolab_status s = chemolab_struwe_sweep(sw_gamma, m, sw_R, ks.data(), ks.size(), quad, &sum, &csv.p);
    if (s != CHEMOLAB_OK) return report_failure(s, "struwe");
    std::cout << csv.str();
    std::printf("# mass = %.12g\n# fitted_slope = %.10g (%.6g pi)\n# predicted_slope = %.10g (%.6g pi)\n",
                sum.mass, sum.fitted_slope, sum.fitted_slope / std::numbers::pi, sum.predicted_slope,
                sum.predicted_slope / std::numbers::pi);
    const std::string dir = output_dir(sw_out, "");
    if (!dir.empty() && !write_text(std::filesystem::path(dir) / "struwe.csv", csv.str())) {
      std::cerr << "chemolab: cannot write into " << dir << "\n";
      return kConfig;
    }
    return kOk;
  }

  if (*report_cmd) {
    std::filesystem::path path(report_path);
    if (std::filesystem::is_directory(path)) path /= "report.json";
    chemolab_report* rep = nullptr;
    const chemolab_status s = chemolab_report_load(path.string().c_str(), &rep);
    if (s != CHEMOLAB_OK) return report_failure(s, "report");
    CString text;
    chemolab_report_text(rep, &text.p);
    chemolab_report_free(rep);
    std::cout << text.str();
    return kOk;
  }
  return kConfig;
}

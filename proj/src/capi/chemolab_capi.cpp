#include "chemolab/chemolab.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "chemolab/errors.hpp"
#include "chemolab/harness.hpp"
#include "chemolab/regime.hpp"
#include "chemolab/stationary.hpp"

struct chemolab_model {
  chemolab::NonlinearityModel model;
};

struct chemolab_config {
  chemolab::RunConfig config;
};

struct chemolab_report {
  chemolab::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;

chemolab_status fail(chemolab_status s, const std::string& message) {
  g_last_error = message;
  return s;
}

// Maps the core exception hierarchy onto status codes.
template <class Fn>
chemolab_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const chemolab::ConfigError& e) {
    return fail(CHEMOLAB_CONFIG_ERROR, e.what());
  } catch (const chemolab::ModelViolation& e) {
    return fail(CHEMOLAB_MODEL_VIOLATION, e.what());
  } catch (const chemolab::StepRejected& e) {
    return fail(CHEMOLAB_STEP_REJECTED, e.what());
  } catch (const chemolab::EnergyTargetNotReached& e) {
    return fail(CHEMOLAB_ENERGY_TARGET_NOT_REACHED, e.what());
  } catch (const chemolab::NoSolutionFound& e) {
    return fail(CHEMOLAB_NO_SOLUTION, e.what());
  } catch (const chemolab::NumericsError& e) {
    return fail(CHEMOLAB_NUMERICS_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CHEMOLAB_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CHEMOLAB_INTERNAL_ERROR, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json verdict_json(const chemolab::RegimeVerdict& v) {
  nlohmann::json j;
  j["region"] = chemolab::to_string(v.region);
  j["basis"] = v.basis;
  j["family"] = v.family;
  j["p"] = v.p;
  j["q"] = v.q;
  j["gamma"] = v.gamma;
  j["n"] = v.n;
  j["critical"] = v.critical;
  j["mass_threshold_general"] = v.mass_threshold_general ? nlohmann::json(*v.mass_threshold_general) : nlohmann::json(nullptr);
  j["mass_threshold_radial"] = v.mass_threshold_radial ? nlohmann::json(*v.mass_threshold_radial) : nlohmann::json(nullptr);
  j["note"] = v.note;
  return j;
}

}  // namespace

extern "C" {

const char* chemolab_version(void) {
  static const std::string v = chemolab::code_version();
  return v.c_str();
}

const char* chemolab_last_error(void) { return g_last_error.c_str(); }

const char* chemolab_status_name(chemolab_status status) {
  switch (status) {
    case CHEMOLAB_OK: return "ok";
    case CHEMOLAB_INVALID_ARGUMENT: return "invalid argument";
    case CHEMOLAB_CONFIG_ERROR: return "configuration error";
    case CHEMOLAB_NUMERICS_ERROR: return "numerics error";
    case CHEMOLAB_INCONCLUSIVE: return "inconclusive";
    case CHEMOLAB_MODEL_VIOLATION: return "model violation";
    case CHEMOLAB_STEP_REJECTED: return "step rejected";
    case CHEMOLAB_ENERGY_TARGET_NOT_REACHED: return "energy target not reached";
    case CHEMOLAB_NO_SOLUTION: return "no solution found";
    case CHEMOLAB_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

void chemolab_string_free(char* s) { std::free(s); }

chemolab_status chemolab_model_power(double p, double q, double s0, chemolab_model** out) {
  if (out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null output handle");
  return guarded([&] {
    *out = new chemolab_model{chemolab::NonlinearityModel::power_type(p, q, s0)};
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_model_volume_filling(double gamma, double s0, chemolab_model** out) {
  if (out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null output handle");
  return guarded([&] {
    *out = new chemolab_model{chemolab::NonlinearityModel::volume_filling(gamma, s0)};
    return CHEMOLAB_OK;
  });
}

void chemolab_model_free(chemolab_model* model) { delete model; }

chemolab_status chemolab_model_eval(const chemolab_model* model, chemolab_curve curve, double s, double* out) {
  if (model == nullptr || out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& m = model->model;
    switch (curve) {
      case CHEMOLAB_CURVE_PHI: *out = chemolab::eval_phi(m, s); break;
      case CHEMOLAB_CURVE_PSI: *out = chemolab::eval_psi(m, s); break;
      case CHEMOLAB_CURVE_G: *out = chemolab::eval_G(m, s); break;
      case CHEMOLAB_CURVE_H: *out = chemolab::eval_H(m, s); break;
      case CHEMOLAB_CURVE_XI: *out = chemolab::eval_Xi(m, s); break;
      case CHEMOLAB_CURVE_XI_INVERSE: *out = chemolab::invert_Xi(m, s); break;
      default: return fail(CHEMOLAB_INVALID_ARGUMENT, "unknown curve");
    }
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_classify_power(double p, double q, int n, char** json_out) {
  if (json_out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    *json_out = dup(verdict_json(chemolab::classify_power(p, q, n)).dump());
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_classify_volume_filling(double gamma, int n, double mass, char** json_out) {
  if (json_out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    std::optional<double> m;
    if (mass >= 0.0) m = mass;
    *json_out = dup(verdict_json(chemolab::classify_volume_filling(gamma, n, m)).dump());
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_config_load(const char* path, chemolab_config** out) {
  if (path == nullptr || out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new chemolab_config{chemolab::load_config(path)};
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_config_parse(const char* text, chemolab_config** out) {
  if (text == nullptr || out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new chemolab_config{chemolab::parse_config(text)};
    return CHEMOLAB_OK;
  });
}

void chemolab_config_free(chemolab_config* config) { delete config; }

chemolab_status chemolab_config_serialize(const chemolab_config* config, char** text_out) {
  if (config == nullptr || text_out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *text_out = dup(chemolab::serialize_config(config->config));
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_config_output_dir(const chemolab_config* config, char** dir_out) {
  if (config == nullptr || dir_out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *dir_out = dup(config->config.output.directory);
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_config_experiment(const chemolab_config* config, char** name_out) {
  if (config == nullptr || name_out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *name_out = dup(chemolab::to_string(config->config.experiment));
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_config_set_strict(chemolab_config* config, int strict) {
  if (config == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null config");
  config->config.strict = strict != 0;
  return CHEMOLAB_OK;
}

chemolab_status chemolab_config_set_require_verdict(chemolab_config* config, int require) {
  if (config == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null config");
  config->config.require_verdict = require != 0;
  return CHEMOLAB_OK;
}

chemolab_status chemolab_config_set_workers(chemolab_config* config, int workers) {
  if (config == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null config");
  if (workers < 0) return fail(CHEMOLAB_INVALID_ARGUMENT, "workers must be nonnegative");
  config->config.workers = workers;
  return CHEMOLAB_OK;
}

chemolab_status chemolab_config_hash(const chemolab_config* config, char** hex_out) {
  if (config == nullptr || hex_out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *hex_out = dup(chemolab::hex64(chemolab::config_hash(config->config)));
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_experiment_run(const chemolab_config* config, const char* out_dir,
                                        chemolab_report** out) {
  if (config == nullptr || out_dir == nullptr || out == nullptr)
    return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto* rep = new chemolab_report{chemolab::run_experiment(config->config, out_dir)};
    *out = rep;
    const auto& r = rep->report;
    if (config->config.strict && r.contradiction)
      return fail(CHEMOLAB_INCONCLUSIVE, "an empirical verdict contradicts the theoretical expectation");
    if (config->config.require_verdict && r.inconclusive)
      return fail(CHEMOLAB_INCONCLUSIVE, "a run ended without a conclusive verdict");
    if (config->config.require_verdict)
      for (const auto& row : r.rows)
        if (!row.error.empty()) return fail(CHEMOLAB_NUMERICS_ERROR, row.error);
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_report_load(const char* path, chemolab_report** out) {
  if (path == nullptr || out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw chemolab::ConfigError(std::string("report: cannot open '") + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    *out = new chemolab_report{chemolab::report_from_json(ss.str())};
    return CHEMOLAB_OK;
  });
}

void chemolab_report_free(chemolab_report* report) { delete report; }

chemolab_status chemolab_report_json(const chemolab_report* report, char** json_out) {
  if (report == nullptr || json_out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *json_out = dup(chemolab::report_json(report->report));
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_report_text(const chemolab_report* report, char** text_out) {
  if (report == nullptr || text_out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *text_out = dup(chemolab::report_text(report->report));
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_struwe_energy(double gamma, double mass, double R, int k, int quad_points, double* out) {
  if (out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    *out = chemolab::struwe_energy(gamma, mass, R, k, quad_points);
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_lifted_energy(double gamma, double mass, double R, int k, int quad_points, double* out) {
  if (out == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    *out = chemolab::lifted_energy(gamma, mass, R, k, quad_points);
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_struwe_sweep(double gamma, double mass, double R, const int* k_values, size_t count,
                                      int quad_points, chemolab_struwe_summary* summary, char** csv_out) {
  if (k_values == nullptr || summary == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::vector<int> ks(k_values, k_values + count);
    const chemolab::StruweResult r = chemolab::struwe_sweep(gamma, mass, R, ks, quad_points);
    summary->gamma = r.gamma;
    summary->mass = r.m;
    summary->fitted_slope = r.fitted_slope;
    summary->predicted_slope = r.predicted_slope;
    if (csv_out != nullptr) *csv_out = dup(chemolab::struwe_csv(r));
    return CHEMOLAB_OK;
  });
}

chemolab_status chemolab_stationary_solve(const chemolab_model* model, double R, int target_is_mass, double value,
                                          int M, double v0_guess, chemolab_stationary_summary* summary,
                                          char** csv_out, char** json_out) {
  if (model == nullptr || summary == nullptr) return fail(CHEMOLAB_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    chemolab::StationaryOptions opt;
    opt.M = M;
    if (v0_guess > 0.0) opt.v0_guess = v0_guess;
    const auto target = target_is_mass ? chemolab::StationaryTarget::with_mass(value)
                                       : chemolab::StationaryTarget::with_d(value);
    const chemolab::StationaryProfile p = chemolab::solve_stationary(model->model, R, target, opt);
    summary->d = p.d;
    summary->mass = p.m;
    summary->v0 = p.shoot_v0;
    summary->energy = p.F_value;
    summary->neumann_residual = p.neumann_residual;
    summary->pohozaev_residual = p.pohozaev_residual;
    summary->constant = p.constant ? 1 : 0;
    if (csv_out != nullptr) *csv_out = dup(chemolab::profile_csv(p));
    if (json_out != nullptr) *json_out = dup(chemolab::profile_json(p));
    return CHEMOLAB_OK;
  });
}

}  // extern "C"

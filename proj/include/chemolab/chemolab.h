/* C interface to the chemolab core. All handles are opaque; every call that
 * can fail returns a chemolab_status and leaves a message retrievable with
 * chemolab_last_error() on the calling thread. Strings returned through
 * char** out-parameters are heap allocated and released with
 * chemolab_string_free(). */
#ifndef CHEMOLAB_H
#define CHEMOLAB_H

#include <stddef.h>

#if defined(_WIN32)
#  define CHEMOLAB_API __declspec(dllexport)
#else
#  define CHEMOLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum chemolab_status {
  CHEMOLAB_OK = 0,
  CHEMOLAB_INVALID_ARGUMENT = 1,
  CHEMOLAB_CONFIG_ERROR = 2,
  CHEMOLAB_NUMERICS_ERROR = 3,
  CHEMOLAB_INCONCLUSIVE = 4,
  CHEMOLAB_MODEL_VIOLATION = 5,
  CHEMOLAB_STEP_REJECTED = 6,
  CHEMOLAB_ENERGY_TARGET_NOT_REACHED = 7,
  CHEMOLAB_NO_SOLUTION = 8,
  CHEMOLAB_INTERNAL_ERROR = 9
} chemolab_status;

typedef struct chemolab_model chemolab_model;
typedef struct chemolab_config chemolab_config;
typedef struct chemolab_report chemolab_report;

CHEMOLAB_API const char* chemolab_version(void);
CHEMOLAB_API const char* chemolab_last_error(void);
CHEMOLAB_API const char* chemolab_status_name(chemolab_status status);
CHEMOLAB_API void chemolab_string_free(char* s);

/* ---- nonlinearity models ---- */
CHEMOLAB_API chemolab_status chemolab_model_power(double p, double q, double s0, chemolab_model** out);
CHEMOLAB_API chemolab_status chemolab_model_volume_filling(double gamma, double s0, chemolab_model** out);
CHEMOLAB_API void chemolab_model_free(chemolab_model* model);

typedef enum chemolab_curve {
  CHEMOLAB_CURVE_PHI = 0,
  CHEMOLAB_CURVE_PSI = 1,
  CHEMOLAB_CURVE_G = 2,
  CHEMOLAB_CURVE_H = 3,
  CHEMOLAB_CURVE_XI = 4,
  CHEMOLAB_CURVE_XI_INVERSE = 5
} chemolab_curve;

CHEMOLAB_API chemolab_status chemolab_model_eval(const chemolab_model* model, chemolab_curve curve,
                                                 double s, double* out);

/* ---- regime classification (JSON verdict records) ---- */
CHEMOLAB_API chemolab_status chemolab_classify_power(double p, double q, int n, char** json_out);
/* mass < 0 means "no mass given" */
CHEMOLAB_API chemolab_status chemolab_classify_volume_filling(double gamma, int n, double mass,
                                                              char** json_out);

/* ---- experiment configuration and execution ---- */
CHEMOLAB_API chemolab_status chemolab_config_load(const char* path, chemolab_config** out);
CHEMOLAB_API chemolab_status chemolab_config_parse(const char* text, chemolab_config** out);
CHEMOLAB_API void chemolab_config_free(chemolab_config* config);
CHEMOLAB_API chemolab_status chemolab_config_serialize(const chemolab_config* config, char** text_out);
CHEMOLAB_API chemolab_status chemolab_config_output_dir(const chemolab_config* config, char** dir_out);
/* experiment type name, e.g. "single" or "critical_mass_sweep" */
CHEMOLAB_API chemolab_status chemolab_config_experiment(const chemolab_config* config, char** name_out);
CHEMOLAB_API chemolab_status chemolab_config_set_strict(chemolab_config* config, int strict);
CHEMOLAB_API chemolab_status chemolab_config_set_require_verdict(chemolab_config* config, int require);
CHEMOLAB_API chemolab_status chemolab_config_set_workers(chemolab_config* config, int workers);
CHEMOLAB_API chemolab_status chemolab_config_hash(const chemolab_config* config, char** hex_out);

/* Runs the experiment, writing artifacts below out_dir. A report is returned
 * whenever the experiment completed; the status is CHEMOLAB_INCONCLUSIVE if
 * the configuration requires a verdict and a run ended Inconclusive, or if
 * strict mode is on and an empirical verdict contradicts the theory. */
CHEMOLAB_API chemolab_status chemolab_experiment_run(const chemolab_config* config, const char* out_dir,
                                                     chemolab_report** out);
CHEMOLAB_API chemolab_status chemolab_report_load(const char* path, chemolab_report** out);
CHEMOLAB_API void chemolab_report_free(chemolab_report* report);
CHEMOLAB_API chemolab_status chemolab_report_json(const chemolab_report* report, char** json_out);
CHEMOLAB_API chemolab_status chemolab_report_text(const chemolab_report* report, char** text_out);

/* ---- Struwe sequence energies ---- */
typedef struct chemolab_struwe_summary {
  double gamma;
  double mass;
  double fitted_slope;
  double predicted_slope;
} chemolab_struwe_summary;

CHEMOLAB_API chemolab_status chemolab_struwe_energy(double gamma, double mass, double R, int k,
                                                    int quad_points, double* out);
CHEMOLAB_API chemolab_status chemolab_lifted_energy(double gamma, double mass, double R, int k,
                                                    int quad_points, double* out);
/* k_values has count entries; csv_out may be NULL. */
CHEMOLAB_API chemolab_status chemolab_struwe_sweep(double gamma, double mass, double R, const int* k_values,
                                                   size_t count, int quad_points,
                                                   chemolab_struwe_summary* summary, char** csv_out);

/* ---- stationary states ---- */
typedef struct chemolab_stationary_summary {
  double d;
  double mass;
  double v0;
  double energy;
  double neumann_residual;
  double pohozaev_residual;
  int constant;
} chemolab_stationary_summary;

/* target_is_mass = 0: value is the offset d; otherwise the target mass.
 * Returns the lowest-energy branch (or the one nearest v0_guess when
 * v0_guess > 0). csv_out and json_out may be NULL. */
CHEMOLAB_API chemolab_status chemolab_stationary_solve(const chemolab_model* model, double R, int target_is_mass,
                                                       double value, int M, double v0_guess,
                                                       chemolab_stationary_summary* summary, char** csv_out,
                                                       char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* CHEMOLAB_H */

#ifndef OPTOMECH_OPTOMECH_H
#define OPTOMECH_OPTOMECH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OM_API __declspec(dllexport)
#else
#define OM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns OM_OK or an error code; the message of the most recent
   failure on the calling thread is available from om_last_error(). */
typedef enum om_status {
  OM_OK = 0,
  OM_ERR_INVALID_ARGUMENT = 1,
  OM_ERR_UNSTABLE = 2,
  OM_ERR_UNPHYSICAL = 3,
  OM_ERR_QUADRATURE = 4,
  OM_ERR_ORTHOGONALITY = 5,
  OM_ERR_CONFIG = 6,
  OM_ERR_IO = 7,
  OM_ERR_INTERNAL = 8
} om_status;

/* Operating point: normalized rates plus, when built from a config, the SI
   parameters they came from. */
typedef struct om_system om_system;
/* Covariance matrix, (q, p) per mode, vacuum variance 1/2. */
typedef struct om_cm om_cm;

typedef struct om_rates {
  double kappa;         /* units of omega_m */
  double gamma_m;
  double coupling;      /* G */
  double detuning;      /* effective Delta */
  double n_bar;
  double thermal_ratio; /* hbar omega_m / (k_B T) */
} om_rates;

typedef struct om_derived {
  om_rates rates;
  double omega_m_si;  /* rad/s; 0 for systems built from rates */
  double kappa_si;
  double g0_si;
  double coupling_si;
  double detuning_si;
  double detuning0_si; /* bare detuning */
  double g0;           /* units of omega_m */
  double alpha_s;
} om_derived;

typedef struct om_stability {
  int stable;
  double s1;
  double s2;
  double max_real_part;
} om_stability;

typedef struct om_cooling {
  double a_plus;
  double a_minus;
  double net_rate;
  double n_eff_perturbative; /* NaN when gamma_m + net_rate <= 0 */
  double n_eff_exact;        /* NaN when unstable */
} om_cooling;

typedef enum om_cm_method {
  OM_CM_LYAPUNOV = 0,
  OM_CM_SPECTRAL_MARKOVIAN = 1,
  OM_CM_SPECTRAL_THERMAL = 2 /* frequency-dependent Brownian kernel */
} om_cm_method;

typedef enum om_format { OM_FORMAT_CSV = 0, OM_FORMAT_JSON = 1 } om_format;

typedef struct om_run_options {
  unsigned threads;
  double tolerance; /* <= 0 keeps the config value */
  uint64_t seed;
  om_format format;
  const char* output_dir; /* NULL means "." */
  int svg;
} om_run_options;

typedef struct om_sweep_summary {
  size_t points;
  size_t unstable;
  size_t failed;
  char data_path[4096];
  char provenance_path[4096];
  char svg_path[4096]; /* empty unless rendered */
} om_sweep_summary;

typedef struct om_verify_options {
  uint64_t seed;
  size_t trajectories;
  unsigned threads;
  double rel_tol;
} om_verify_options;

OM_API const char* om_version(void);
OM_API const char* om_last_error(void);
OM_API const char* om_status_name(om_status status);

OM_API om_status om_system_load(const char* path, om_system** out);
OM_API om_status om_system_parse(const char* yaml_text, om_system** out);
OM_API om_status om_system_from_rates(const om_rates* rates, om_system** out);
OM_API void om_system_free(om_system* system);
OM_API om_status om_system_derived(const om_system* system, om_derived* out);
OM_API om_status om_system_stability(const om_system* system, om_stability* out);
OM_API om_status om_system_cooling(const om_system* system, om_cooling* out);

/* Intracavity (mechanics, cavity) CM. tol applies to the spectral methods. */
OM_API om_status om_steady_cm(const om_system* system, om_cm_method method, double tol, om_cm** out);
/* (mechanics, output 1, ..., output n) CM for filters centred at
   centers[k] (units of omega_m) with common epsilon = omega_m tau. */
OM_API om_status om_output_cm(const om_system* system, const double* centers, size_t n_centers, double epsilon,
                              double tol, int markovian, om_cm** out);
OM_API void om_cm_free(om_cm* cm);
OM_API size_t om_cm_dim(const om_cm* cm);
OM_API om_status om_cm_get(const om_cm* cm, size_t row, size_t col, double* out);
/* Row-major copy into buffer of at least dim * dim doubles. */
OM_API om_status om_cm_copy(const om_cm* cm, double* buffer, size_t length);
OM_API const char* om_cm_label(const om_cm* cm, size_t mode);
OM_API om_status om_cm_min_symplectic(const om_cm* cm, double* out);

/* Log-negativity between two modes of the CM. */
OM_API om_status om_log_negativity(const om_cm* cm, size_t mode_a, size_t mode_b, double* out);
/* Three-mode CM: smallest transposed symplectic eigenvalue minus 1/2 for the
   cuts mode 0 | rest, mode 1 | rest, mode 2 | rest. */
OM_API om_status om_tripartite(const om_cm* cm, double values[3], int* fully_inseparable);

/* Normal-ordered cavity output spectrum at n frequencies (units of omega_m). */
OM_API om_status om_output_spectrum(const om_system* system, const double* omegas, size_t n, int markovian,
                                    double* out);

OM_API void om_run_options_init(om_run_options* options);
OM_API om_status om_run_sweep(const char* config_path, const om_run_options* options, om_sweep_summary* out);

OM_API void om_verify_options_init(om_verify_options* options);
/* Runs the cross-method suite on the system. *report receives a
   newly allocated text report, released with om_string_free. */
OM_API om_status om_verify(const om_system* system, const om_verify_options* options, char** report,
                           int* all_passed);
OM_API void om_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif

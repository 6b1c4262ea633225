#ifndef NSF_NSF_H
#define NSF_NSF_H

#include <stddef.h>

#if defined(NSF_BUILDING_LIBRARY)
#define NSF_API __attribute__((visibility("default")))
#else
#define NSF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsf_status {
  NSF_OK = 0,
  NSF_ERR_DOMAIN = 1,      /* argument outside the mathematical domain */
  NSF_ERR_VALIDATION = 2,  /* input data violate a structural hypothesis */
  NSF_ERR_IO = 3,
  NSF_ERR_MISUSE = 4,      /* null handle, bad argument combination */
  NSF_ERR_NUMERIC = 5,     /* solver failure, aborted run */
  NSF_ERR_INTERNAL = 6
} nsf_status;

typedef struct nsf_eos nsf_eos;
typedef struct nsf_scenario nsf_scenario;
typedef struct nsf_trajectory nsf_trajectory;

/* Library version string; static storage. */
NSF_API const char* nsf_version(void);

/* Message of the last failed call on this thread; empty after success. */
NSF_API const char* nsf_last_error(void);

/* Frees strings returned through char** out-parameters. */
NSF_API void nsf_string_free(char* s);

/* Equation of state documents (shape, a, p_inf, entropy_const, third_law, lambda_exp, table). */
NSF_API nsf_status nsf_eos_from_json(const char* json, nsf_eos** out);
NSF_API nsf_status nsf_eos_load(const char* path, nsf_eos** out);
NSF_API void nsf_eos_destroy(nsf_eos* eos);

/* out[0..2] = pressure, specific internal energy, specific entropy. */
NSF_API nsf_status nsf_eos_thermo(const nsf_eos* eos, double rho, double theta, double out[3]);

/* Runs every EOS and transport invariant; report is a JSON array of items. */
NSF_API nsf_status nsf_eos_check(const nsf_eos* eos, char** report_json, int* all_pass);

/* Scenario files are fully validated; every issue is listed in nsf_last_error(). */
NSF_API nsf_status nsf_scenario_load(const char* path, nsf_scenario** out);
NSF_API nsf_status nsf_scenario_from_json(const char* json, nsf_scenario** out);
NSF_API void nsf_scenario_destroy(nsf_scenario* sc);

/* Face classification and inflow admissibility of a scenario file. */
NSF_API nsf_status nsf_audit_boundary_file(const char* path, char** report_json, int* pass);

/* Integrates to t_end. An aborted run still returns its partial trajectory with NSF_ERR_NUMERIC. */
NSF_API nsf_status nsf_run(const nsf_scenario* sc, nsf_trajectory** out);
NSF_API void nsf_trajectory_destroy(nsf_trajectory* tr);
NSF_API nsf_status nsf_trajectory_info(const nsf_trajectory* tr, size_t* n_states, size_t* n_steps,
                                       int* aborted);

/* Copies the state at output index k; each array holds n_cells values. */
NSF_API nsf_status nsf_trajectory_state(const nsf_trajectory* tr, size_t k, double* t, double* rho,
                                        double* u, double* theta, size_t n_cells);

/* Writes state_<t>.csv files and fluxes.csv into dir. */
NSF_API nsf_status nsf_trajectory_export(const nsf_trajectory* tr, const char* dir);

/* Budgets over the whole trajectory; csv (optional) receives the windowed budget table. */
NSF_API nsf_status nsf_audit(const nsf_scenario* sc, const nsf_trajectory* tr, char** report_json,
                             char** csv, int* pass);

/* Manufactured-solution convergence study. kind: thermal_relaxation, acoustic_smooth, throughflow. */
NSF_API nsf_status nsf_converge(const char* kind, const size_t* resolutions, size_t count, double t_end,
                                double dt_over_h, char** report_json, int* pass);

/* Relative energy of coarse runs against 4x finer references; csv (optional) receives the trace
   of the finest coarse run. */
NSF_API nsf_status nsf_weak_strong(const nsf_scenario* sc, const size_t* coarse, size_t count, double t_end,
                                   double every, char** report_json, char** csv, int* pass);

#ifdef __cplusplus
}
#endif

#endif

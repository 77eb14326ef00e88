/* frictionlab: particle-membrane friction model, classical and quantum. */
#ifndef FRICTIONLAB_FRICTIONLAB_H
#define FRICTIONLAB_FRICTIONLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FRICTIONLAB_BUILDING)
#    define FL_API __declspec(dllexport)
#  else
#    define FL_API __declspec(dllimport)
#  endif
#else
#  define FL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fl_status {
  FL_OK = 0,
  FL_ERR_ARGUMENT = 1,     /* null handle, bad enum value, unknown name */
  FL_ERR_CONFIG = 2,       /* unparsable config, unknown key */
  FL_ERR_PRECONDITION = 3, /* geometry, CFL, non-confining potential, ... */
  FL_ERR_NUMERICAL = 4,    /* iterative method failed or non-finite values */
  FL_ERR_DIVERGENCE = 5,   /* requested integral is infinite */
  FL_ERR_AMBIGUOUS = 6,    /* no fit model wins */
  FL_ERR_IO = 7,
  FL_ERR_INTERNAL = 8
} fl_status;

/* Suggested process exit code: 0 ok, 2 usage/config, 1 numerical. */
FL_API int fl_exit_code(fl_status status);
FL_API const char* fl_status_name(fl_status status);

/* Message of the last failing call on this thread ("" if none). */
FL_API const char* fl_last_error(void);
FL_API const char* fl_version(void);

/* 0 quiet, 1 warnings (default), 2 info. */
FL_API fl_status fl_set_log_level(int level);

typedef struct fl_config fl_config;
typedef struct fl_result fl_result;

FL_API fl_status fl_config_new(fl_config** out);
FL_API fl_status fl_config_parse(const char* text, fl_config** out);
FL_API fl_status fl_config_load(const char* path, fl_config** out);
FL_API fl_status fl_config_clone(const fl_config* config, fl_config** out);
FL_API void fl_config_free(fl_config* config);
FL_API fl_status fl_config_set(fl_config* config, const char* section, const char* key,
                               const char* value);
/* Returned strings stay valid until the next call on the same config. */
FL_API const char* fl_config_get(const fl_config* config, const char* section, const char* key);
FL_API const char* fl_config_canonical(const fl_config* config);
FL_API const char* fl_config_hash(const fl_config* config);

/* Results: named scalars, named strings and named CSV tables. Indices run
 * over [0, count). Pointers stay valid until fl_result_free. */
FL_API void fl_result_free(fl_result* result);
FL_API size_t fl_result_scalar_count(const fl_result* result);
FL_API const char* fl_result_scalar_name(const fl_result* result, size_t index);
FL_API double fl_result_scalar_value(const fl_result* result, size_t index);
FL_API fl_status fl_result_scalar(const fl_result* result, const char* name, double* value);
FL_API size_t fl_result_string_count(const fl_result* result);
FL_API const char* fl_result_string_name(const fl_result* result, size_t index);
FL_API const char* fl_result_string_value(const fl_result* result, size_t index);
/* NULL when absent. */
FL_API const char* fl_result_string(const fl_result* result, const char* name);
FL_API size_t fl_result_table_count(const fl_result* result);
FL_API const char* fl_result_table_name(const fl_result* result, size_t index);
FL_API const char* fl_result_table(const fl_result* result, const char* name);
FL_API fl_status fl_result_write_table(const fl_result* result, const char* name,
                                       const char* path);

/* Friction coefficient with its breakdown. check_scaling != 0 also tests the
 * homogeneity laws (scalars scaling_rho1, scaling_rho2, scaling_c, scaling_ok). */
FL_API fl_status fl_gamma(const fl_config* config, int check_scaling, fl_result** out);

/* Infrared integrals over a sigma grid: table "ir" and string "classification".
 * dressed is NULL, "membrane" or "nelson"; q is the dressing displacement. */
FL_API fl_status fl_ir(const fl_config* config, const double* sigmas, size_t count,
                       const char* dressed, double q, fl_result** out);

/* Classical run per the [classical] section: table "series", fit scalars. */
FL_API fl_status fl_classical(const fl_config* config, fl_result** out);

/* Ground state of the configured discretized model: scalars E0, E_p0,
 * N_expect, residual, top_weight; table "occupations". */
FL_API fl_status fl_quantum_solve(const fl_config* config, fl_result** out);

/* Van Hove comparison (two scalar modes) at truncation n_max. */
FL_API fl_status fl_quantum_vanhove(unsigned n_max, fl_result** out);

/* kind: "sigma", "support", "truncation", "vanhove-truncation",
 * "classical-force". Grid comes from the [sweep] section. csv_path may be
 * NULL; otherwise rows are appended as they finish and reused on rerun. */
FL_API fl_status fl_sweep(const fl_config* config, const char* kind, const char* csv_path,
                          fl_result** out);

/* Property suite. fault is NULL or "none" (or a test fixture name); only is
 * a comma-separated list of check names or NULL. Scalar "passed" is 1 iff
 * every selected check passed; table "checks" lists them. */
FL_API fl_status fl_verify(const char* fault, const char* only, fl_result** out);
FL_API fl_status fl_verify_list(fl_result** out);

/* Manifest bookkeeping. outputs is a list of count file paths. */
FL_API fl_status fl_manifest_write(const char* path, const fl_config* config,
                                   const char* command, const char* started,
                                   const char* const* outputs, size_t count);
/* Scalar "consistent" and string "problems" (newline separated). */
FL_API fl_status fl_manifest_check(const char* path, fl_result** out);
FL_API const char* fl_now(void);

#ifdef __cplusplus
}
#endif

#endif

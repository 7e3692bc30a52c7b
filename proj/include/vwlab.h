#ifndef VWLAB_H
#define VWLAB_H

#include <stddef.h>

#if defined(_WIN32)
#define VWLAB_API __declspec(dllexport)
#else
#define VWLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes. */
typedef enum vwlab_status {
  VWLAB_OK = 0,
  VWLAB_E_CONFIG = 2,     /* bad configuration or argument value */
  VWLAB_E_HYPOTHESIS = 3, /* a modelling assumption is violated */
  VWLAB_E_SOLVER = 4,     /* solver abort or failed validation */
  VWLAB_E_IO = 5,
  VWLAB_E_NULL = 6        /* a required pointer was NULL */
} vwlab_status;

typedef struct vwlab_config vwlab_config;
typedef struct vwlab_kernel vwlab_kernel;

VWLAB_API const char* vwlab_version(void);
/* Message of the last failing call on this thread; "" if none. */
VWLAB_API const char* vwlab_last_error(void);
/* Worker threads for parallel loops; n <= 0 keeps the runtime default. */
VWLAB_API void vwlab_set_threads(int n);

/* Flat "section.key = value" text; overrides use the same syntax and win. Either may be NULL. */
VWLAB_API vwlab_status vwlab_config_from_text(const char* text, const char* overrides, vwlab_config** out);
VWLAB_API vwlab_status vwlab_config_from_file(const char* path, const char* overrides, vwlab_config** out);
VWLAB_API void vwlab_config_free(vwlab_config* cfg);
/* 16 hex digits plus the terminator. */
VWLAB_API vwlab_status vwlab_config_hash(const vwlab_config* cfg, char out[17]);
VWLAB_API const char* vwlab_config_mode(const vwlab_config* cfg);
/* Resolved configuration text. *needed receives the size including the terminator; buf may be
   NULL when cap is 0. */
VWLAB_API vwlab_status vwlab_config_text(const vwlab_config* cfg, char* buf, size_t cap, size_t* needed);
/* Executes the configured mode into out_dir; returns the exit code. */
VWLAB_API int vwlab_run(const vwlab_config* cfg, const char* out_dir);

/* Memory kernel of a bump sigma2 on R^n with the given support radius and mass. */
VWLAB_API vwlab_status vwlab_kernel_create(int n, double support_radius, double mass, vwlab_kernel** out);
VWLAB_API void vwlab_kernel_free(vwlab_kernel* k);
VWLAB_API vwlab_status vwlab_kernel_q(const vwlab_kernel* k, double t, double* out);
VWLAB_API vwlab_status vwlab_kernel_p(const vwlab_kernel* k, double t, double c, double* out);
/* Fails with VWLAB_E_HYPOTHESIS for n <= 2. */
VWLAB_API vwlab_status vwlab_kernel_kappa(const vwlab_kernel* k, double* out);
VWLAB_API vwlab_status vwlab_kernel_tail_constant(const vwlab_kernel* k, double* out);

/* W1 between weighted atoms on the line; the second measure is rescaled to the first's mass. */
VWLAB_API vwlab_status vwlab_wasserstein1(const double* x, const double* wx, size_t nx, const double* y,
                                          const double* wy, size_t ny, double* out);

/* One acceptance criterion (1..11); detail is truncated to cap. */
VWLAB_API vwlab_status vwlab_run_criterion(int id, int* passed, double* seconds, char* detail, size_t cap);

#ifdef __cplusplus
}
#endif

#endif

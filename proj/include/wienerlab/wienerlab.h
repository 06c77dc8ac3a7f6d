#ifndef WIENERLAB_H
#define WIENERLAB_H

/* C interface to libwienerlab. Every call returns a wl_status; on failure the
 * message is available from wl_last_error() on the calling thread until the
 * next failing call. Handles are opaque and released with the matching
 * *_free function; freeing NULL is a no-op. */

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define WL_API __attribute__((visibility("default")))
#else
#define WL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wl_status {
  WL_OK = 0,
  WL_INVALID_ARGUMENT = 1,
  WL_GRID_MISMATCH = 2,
  WL_DOMAIN = 3,
  WL_UNSUPPORTED = 4,
  WL_NO_MALLIAVIN = 5,
  WL_NON_FINITE = 6,
  WL_DEGENERATE = 7,
  WL_CONFIG = 8,
  WL_IO = 9,
  WL_CONTRACT_FAILED = 10,
  WL_INTERNAL = 99
} wl_status;

typedef struct wl_grid wl_grid;
typedef struct wl_profile wl_profile;
typedef struct wl_functional wl_functional;
typedef struct wl_bsde wl_bsde;

typedef struct wl_mc_config {
  size_t n_samples;
  size_t n_batches;
  uint64_t seed;
  size_t n_inner;
  unsigned threads;
} wl_mc_config;

typedef struct wl_estimate {
  double value;
  double std_error;
  size_t n;
} wl_estimate;

WL_API const char* wl_version(void);
WL_API const char* wl_last_error(void);
WL_API const char* wl_status_name(wl_status status);
/* Defaults: 100000 samples, 20 batches, seed 1, no inner samples, 1 thread. */
WL_API wl_mc_config wl_mc_default(void);

/* Grids and rotation profiles */
WL_API wl_status wl_grid_uniform(double horizon, size_t cells, wl_grid** out);
WL_API void wl_grid_free(wl_grid* grid);
WL_API size_t wl_grid_cells(const wl_grid* grid);
WL_API double wl_grid_horizon(const wl_grid* grid);

WL_API wl_status wl_profile_indicator(const wl_grid* grid, double a, double b, wl_profile** out);
WL_API wl_status wl_profile_constant(const wl_grid* grid, double r, wl_profile** out);
WL_API void wl_profile_free(wl_profile* profile);

/* Functionals from the catalog; params is a YAML mapping or NULL. */
WL_API wl_status wl_functional_create(const wl_grid* grid, const char* name, const char* params,
                               wl_functional** out);
WL_API void wl_functional_free(wl_functional* functional);
/* Name written into buf (truncated, always terminated); returns the full length. */
WL_API size_t wl_functional_name(const wl_functional* functional, char* buf, size_t size);

/* Estimators */
WL_API wl_status wl_p_norm_diff(const wl_functional* xi, const wl_profile* phi, double p,
                         const wl_mc_config* cfg, wl_estimate* out);
WL_API wl_status wl_sandwich_ratio(const wl_functional* xi, double a, double b, double p,
                            const wl_mc_config* cfg, wl_estimate* ratio, int* within_bounds);
/* Phi seminorm with a catalog Phi variant; params is a YAML mapping or NULL. */
WL_API wl_status wl_seminorm(const wl_functional* xi, const char* phi_name, const char* phi_params, double p,
                      const wl_mc_config* cfg, wl_estimate* out);
/* ||xi - E(xi | G_a^b)||_2 from the chaos expansion (polynomial functionals). */
WL_API wl_status wl_chaos_residual(const wl_functional* xi, double a, double b, double* out);

/* Scalar BMO formulas */
WL_API wl_status wl_kazamaki_phi(double beta, double* out);
WL_API wl_status wl_kazamaki_psi(double gamma, double beta, double* out);
WL_API wl_status wl_phi_inverse(double x, double* out);
WL_API wl_status wl_p0_threshold(double lz, double s_inf, double* out);
/* *has_bound is 0 when sl >= Phi(beta). */
WL_API wl_status wl_rh_bound(double sl, size_t n_slices, double beta, int* has_bound, double* out);

/* BSDE presets */
WL_API wl_status wl_bsde_solve_preset(const char* preset, double horizon, size_t steps, wl_bsde** out);
WL_API void wl_bsde_free(wl_bsde* solution);
WL_API wl_status wl_bsde_value(const wl_bsde* solution, size_t k, double x, double* out);
/* Value at t = 0 and the preset starting point. */
WL_API wl_status wl_bsde_y0(const wl_bsde* solution, double* out);

/* Experiment runner. threads = 0 keeps the config value; out_dir NULL keeps
 * the configured or environment directory. *exit_code is 0 when every
 * contract passes and 2 otherwise; the failing record is then in
 * wl_last_error(). */
WL_API wl_status wl_run_config(const char* path, unsigned threads, const char* out_dir, int* exit_code);
/* Newly allocated text; release with wl_string_free. */
WL_API wl_status wl_catalog(char** out);
WL_API void wl_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif

/* taprig C ABI: simulator environments, calibration, and metrics. */

#ifndef TAPRIG_H
#define TAPRIG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum TaprigStatus {
  TAPRIG_STATUS_OK = 0,
  TAPRIG_STATUS_NULL_ARGUMENT = 1,
  TAPRIG_STATUS_INVALID_UTF8 = 2,
  TAPRIG_STATUS_IO = 3,
  TAPRIG_STATUS_PARSE = 4,
  TAPRIG_STATUS_INVALID_INPUT = 5,
  TAPRIG_STATUS_OUT_OF_REACH = 6,
  TAPRIG_STATUS_INTERNAL = 7,
} TaprigStatus;

/**
 * Opaque simulator environment handle.
 */
typedef struct TaprigEnv TaprigEnv;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread; do not free.
 */
const char *taprig_last_error(void);

/**
 * Library version as a static string; do not free.
 */
const char *taprig_version(void);

/**
 * Release a string allocated by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned through a `char**` out
 * parameter of this library, not yet freed. NULL is accepted.
 */
void taprig_string_free(char *s);

/**
 * Load a screen pack and create an environment positioned at its home
 * screen. On success `*out_env` owns the handle; release it with
 * [`taprig_env_free`].
 *
 * # Safety
 * `pack_path` must be a valid NUL-terminated string; `out_env` must be a
 * valid pointer.
 */
enum TaprigStatus taprig_env_load(const char *pack_path, struct TaprigEnv **out_env);

/**
 * Release an environment handle.
 *
 * # Safety
 * `env` must come from [`taprig_env_load`] and not be used afterwards.
 */
void taprig_env_free(struct TaprigEnv *env);

/**
 * Reset to the phone home screen, restoring declared variable values.
 *
 * # Safety
 * `env` must be a live handle from [`taprig_env_load`].
 */
enum TaprigStatus taprig_env_reset_phone_home(struct TaprigEnv *env);

/**
 * Reset to an app's home screen.
 *
 * # Safety
 * `env` must be a live handle; `app_id` a valid NUL-terminated string.
 */
enum TaprigStatus taprig_env_reset_app_home(struct TaprigEnv *env, const char *app_id);

/**
 * Observe the current screen as a JSON document (step index, raster
 * reference, scene graph, dims). The returned string must be freed with
 * [`taprig_string_free`].
 *
 * # Safety
 * `env` must be a live handle; `out_json` a valid pointer.
 */
enum TaprigStatus taprig_env_observe_json(struct TaprigEnv *env, char **out_json);

/**
 * Dispatch a single tap at integer pixel coordinates. `out_changed`, when
 * non-null, reports whether the visible state changed.
 *
 * # Safety
 * `env` must be a live handle.
 */
enum TaprigStatus taprig_env_tap(struct TaprigEnv *env, int32_t x, int32_t y, bool *out_changed);

/**
 * Dispatch a straight-line contact swipe between two pixel points.
 *
 * # Safety
 * `env` must be a live handle.
 */
enum TaprigStatus taprig_env_swipe(struct TaprigEnv *env,
                                   double x1,
                                   double y1,
                                   double x2,
                                   double y2,
                                   bool *out_changed);

/**
 * Current screen id; free the string with [`taprig_string_free`].
 *
 * # Safety
 * `env` must be a live handle; `out_screen` a valid pointer.
 */
enum TaprigStatus taprig_env_current_screen(struct TaprigEnv *env, char **out_screen);

/**
 * Success rate over exact counts: `successes / total`.
 */
enum TaprigStatus taprig_success_rate(uint32_t successes, uint32_t total, double *out_ratio);

/**
 * Least-squares affine calibration. `pixels_xy` and `workspace_xy` are
 * interleaved x,y arrays of `n_points` points each. Writes the row-major
 * 2x3 affine into `out_affine` and the max fit error into `out_residual`.
 *
 * # Safety
 * The arrays must hold at least `2 * n_points` doubles; `out_affine` at
 * least 6.
 */
enum TaprigStatus taprig_fit_calibration(const double *pixels_xy,
                                         const double *workspace_xy,
                                         uintptr_t n_points,
                                         double z_contact,
                                         double z_hover,
                                         double *out_affine,
                                         double *out_residual);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TAPRIG_H */

#ifndef LEACHATE_H
#define LEACHATE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of an API call. Values 2 to 5 match the command-line exit codes.
typedef enum LeachateStatus {
  LEACHATE_STATUS_OK = 0,
  LEACHATE_STATUS_NULL_POINTER = 1,
  LEACHATE_STATUS_CONFIG = 2,
  LEACHATE_STATUS_UNSTABLE = 3,
  LEACHATE_STATUS_BLOW_UP = 4,
  LEACHATE_STATUS_IO = 5,
  LEACHATE_STATUS_OUT_OF_RANGE = 6,
  LEACHATE_STATUS_PANIC = 7,
} LeachateStatus;

// Opaque simulation configuration.
typedef struct LeachateConfig LeachateConfig;

// Opaque simulation result holding every output snapshot.
typedef struct LeachateResult LeachateResult;

// Explicit-scheme stability numbers for a config.
typedef struct LeachateStability {
  double r_x;
  double r_z;
  double courant_x;
  double courant_z;
  double peclet_x;
  double peclet_z;
  bool stable;
} LeachateStability;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or an empty string.
// The pointer stays valid until the next API call on the same thread.
const char *leachate_last_error_message(void);

// Complementary error function, accurate to about 1e-15 relative.
double leachate_erfc(double x);

// One-dimensional analytical concentration at depth `z` (cm) and time `t`
// (day). `d` in cm²/day, `v` in cm/day, `r` the retardation factor.
//
// # Safety
// `out` must be null or point to writable memory for one `double`.
enum LeachateStatus leachate_ogata_1d(double z,
                                      double t,
                                      double d,
                                      double v,
                                      double c0,
                                      double background,
                                      double r,
                                      double *out);

// Creates a config from a built-in preset (`landfill-cl`, `landfill-k`).
//
// # Safety
// `name` must be null or a NUL-terminated string; `out` null or writable.
enum LeachateStatus leachate_config_from_preset(const char *name, struct LeachateConfig **out);

// Parses a config document.
//
// # Safety
// `document` must be null or a NUL-terminated string; `out` null or writable.
enum LeachateStatus leachate_config_from_str(const char *document, struct LeachateConfig **out);

// # Safety
// `config` must be null or a handle from this library not yet freed.
void leachate_config_free(struct LeachateConfig *config);

// Sets the time step in days. The config is unchanged on failure.
//
// # Safety
// `config` must be null or a live handle.
enum LeachateStatus leachate_config_set_dt(struct LeachateConfig *config, double dt);

// Sets the final time in days, dropping output times beyond it.
//
// # Safety
// `config` must be null or a live handle.
enum LeachateStatus leachate_config_set_t_end(struct LeachateConfig *config, double t_end);

// # Safety
// `config` must be null or a live handle; `out` null or writable.
enum LeachateStatus leachate_config_stability(const struct LeachateConfig *config,
                                              struct LeachateStability *out);

// Runs the simulation. `*out` is null on failure.
//
// # Safety
// `config` must be null or a live handle; `out` null or writable.
enum LeachateStatus leachate_run(const struct LeachateConfig *config, struct LeachateResult **out);

// # Safety
// `result` must be null or a handle from [`leachate_run`] not yet freed.
void leachate_result_free(struct LeachateResult *result);

// Number of stored snapshots, 0 for a null handle.
//
// # Safety
// `result` must be null or a live handle.
size_t leachate_result_snapshot_count(const struct LeachateResult *result);

// # Safety
// `result` must be null or a live handle; `nx` and `nz` null or writable.
enum LeachateStatus leachate_result_dims(const struct LeachateResult *result,
                                         size_t *nx,
                                         size_t *nz);

// # Safety
// `result` must be null or a live handle; `t` null or writable.
enum LeachateStatus leachate_result_snapshot_time(const struct LeachateResult *result,
                                                  size_t index,
                                                  double *t);

// Copies snapshot `index` into `buffer`, which must hold at least
// `nx * nz` values.
//
// # Safety
// `result` must be null or a live handle; `buffer` null or valid for
// `len` writes.
enum LeachateStatus leachate_result_copy_snapshot(const struct LeachateResult *result,
                                                  size_t index,
                                                  double *buffer,
                                                  size_t len);

// Writes every snapshot as profile CSV to `path`.
//
// # Safety
// `result` must be null or a live handle; `path` null or NUL-terminated.
enum LeachateStatus leachate_result_write_csv(const struct LeachateResult *result,
                                              const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEACHATE_H */

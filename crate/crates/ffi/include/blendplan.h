#ifndef BLENDPLAN_H
#define BLENDPLAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every exported function.
 */
typedef enum BlendplanStatus {
  BLENDPLAN_STATUS_OK = 0,
  BLENDPLAN_STATUS_NULL_POINTER = 1,
  BLENDPLAN_STATUS_INVALID_UTF8 = 2,
  BLENDPLAN_STATUS_INVALID_INPUT = 3,
  BLENDPLAN_STATUS_NOT_FOUND = 4,
  BLENDPLAN_STATUS_NO_SOLUTION = 5,
  BLENDPLAN_STATUS_SOLVER_UNAVAILABLE = 6,
  BLENDPLAN_STATUS_INTERNAL = 7,
} BlendplanStatus;

/**
 * A loaded planning case. Opaque to C callers.
 */
typedef struct BlendplanCase BlendplanCase;

/**
 * The outcome of solving a case. Opaque to C callers.
 */
typedef struct BlendplanRun BlendplanRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the library as a static NUL-terminated string.
 */
const char *blendplan_version(void);

/**
 * Message of the last failure on the calling thread, or null if none.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *blendplan_last_error(void);

/**
 * Chen friction factor for Reynolds number `reynolds`, absolute roughness
 * `roughness_mm` (mm) and inner diameter `diameter_m` (m).
 *
 * # Safety
 * `out` must be null or point to writable memory for one `double`.
 */
enum BlendplanStatus blendplan_chen_friction(double reynolds,
                                             double roughness_mm,
                                             double diameter_m,
                                             double *out);

/**
 * Loads a case from the CSV directory `system_dir`.
 *
 * `temporal_dir` holds the temporal mapping and weights and defaults to
 * `system_dir` when null. `config_toml` is the text of a scenario
 * configuration; null selects the defaults. On success `*out` receives a
 * handle to release with [`blendplan_case_free`].
 *
 * # Safety
 * String arguments must be null or NUL-terminated. `out` must be null or
 * point to writable memory for one pointer.
 */
enum BlendplanStatus blendplan_case_load(const char *system_dir,
                                         const char *temporal_dir,
                                         const char *config_toml,
                                         struct BlendplanCase **out);

/**
 * Releases a case. Null is ignored.
 *
 * # Safety
 * `case` must be null or a handle from [`blendplan_case_load`] that has not
 * been freed.
 */
void blendplan_case_free(struct BlendplanCase *case_);

/**
 * Selects the gas flow formulation by name: `stp`, `btp` or `bpp`.
 *
 * # Safety
 * `case` must be null or a live case handle. `name` must be null or
 * NUL-terminated.
 */
enum BlendplanStatus blendplan_case_set_formulation(struct BlendplanCase *case_, const char *name);

/**
 * Sizes of a loaded case. Any output pointer may be null.
 *
 * # Safety
 * `case` must be null or a live case handle. Non-null outputs must point to
 * writable memory for one `size_t`.
 */
enum BlendplanStatus blendplan_case_counts(const struct BlendplanCase *case_,
                                           size_t *nodes,
                                           size_t *pipelines,
                                           size_t *units,
                                           size_t *slots);

/**
 * Builds and solves a case, writing model and solution files to `out_dir`.
 *
 * `solver` is the path of the `blendplan-highs` runner; null searches next
 * to the running executable. A solve that ends without a solution (for
 * example an infeasible model) still returns [`BlendplanStatus::Ok`] and a
 * run handle; query it with [`blendplan_run_has_solution`]. Release the
 * handle with [`blendplan_run_free`].
 *
 * # Safety
 * `case` must be null or a live case handle. String arguments must be null
 * or NUL-terminated. `out` must be null or point to writable memory for one
 * pointer.
 */
enum BlendplanStatus blendplan_case_solve(const struct BlendplanCase *case_,
                                          const char *solver,
                                          const char *out_dir,
                                          struct BlendplanRun **out);

/**
 * Releases a run. Null is ignored.
 *
 * # Safety
 * `run` must be null or a handle from [`blendplan_case_solve`] that has not
 * been freed.
 */
void blendplan_run_free(struct BlendplanRun *run);

/**
 * Returns 1 if the run holds a solution and 0 otherwise (including null).
 *
 * # Safety
 * `run` must be null or a live run handle.
 */
int32_t blendplan_run_has_solution(const struct BlendplanRun *run);

/**
 * Solver status of the run as a static NUL-terminated string, or null.
 *
 * # Safety
 * `run` must be null or a live run handle.
 */
const char *blendplan_run_status(const struct BlendplanRun *run);

/**
 * Objective value (M€) of a solved run.
 *
 * # Safety
 * `run` must be null or a live run handle. `out` must be null or point to
 * writable memory for one `double`.
 */
enum BlendplanStatus blendplan_run_objective(const struct BlendplanRun *run, double *out);

/**
 * Value of the model variable called `name` in a solved run.
 *
 * # Safety
 * `run` must be null or a live run handle. `name` must be null or
 * NUL-terminated. `out` must be null or point to writable memory for one
 * `double`.
 */
enum BlendplanStatus blendplan_run_value(const struct BlendplanRun *run,
                                         const char *name,
                                         double *out);

/**
 * Weighted hydrogen non-served as a share of hydrogen deployment.
 *
 * # Safety
 * `run` must be null or a live run handle. `out` must be null or point to
 * writable memory for one `double`.
 */
enum BlendplanStatus blendplan_run_h2ns_share(const struct BlendplanRun *run, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLENDPLAN_H */

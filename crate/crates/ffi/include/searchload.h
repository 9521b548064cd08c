#ifndef SEARCHLOAD_H
#define SEARCHLOAD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_CONFIG = 3,
  SL_STATUS_INFEASIBLE = 4,
  SL_STATUS_NO_CONVERGENCE = 5,
  SL_STATUS_OUT_OF_RANGE = 6,
  SL_STATUS_PANIC = 7,
} SlStatus;

/**
 * Opaque problem handle.
 */
typedef struct SlProblem SlProblem;

/**
 * Opaque result handle.
 */
typedef struct SlResult SlResult;

/**
 * Optimum in dimensionless form. `phase` is 0, 1 or 2 for the 0->1, 1->2
 * and 2->3 regimes.
 */
typedef struct {
  double r_theta;
  double eps;
  double r_d;
  double r_f;
  double r_s;
  double l_s;
  double l_tilde;
  double eta;
  double s0;
  int32_t phase;
} SlOptimum;

typedef struct {
  double r_s;
  double r_theta;
  double eps;
  double r_d;
  double l_tilde;
  /**
   * NaN where the cumulative requirement cannot be met.
   */
  double r_f;
  double l_s;
  bool feasible;
} SlCurvePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sl_last_error_message(void);

/**
 * Builds a problem from a shipped preset name such as `q1_swerling2`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
SlStatus sl_problem_from_preset(const char *name, SlProblem **out);

/**
 * Builds a problem from the text of a flat TOML scenario file.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
SlStatus sl_problem_from_toml(const char *text, SlProblem **out);

/**
 * Overrides the `r_S` sampling step.
 *
 * # Safety
 * `problem` must be a live handle.
 */
SlStatus sl_problem_set_grid_step(SlProblem *problem, double step);

/**
 * # Safety
 * `problem` must be NULL or a handle not yet freed.
 */
void sl_problem_free(SlProblem *problem);

/**
 * Solves the problem. On success `*out` receives a result handle.
 *
 * # Safety
 * `problem` must be a live handle and `out` a valid pointer.
 */
SlStatus sl_optimize(const SlProblem *problem, SlResult **out);

/**
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
SlStatus sl_result_optimum(const SlResult *result, SlOptimum *out);

/**
 * Number of `r_S` samples in the result curves; 0 for a NULL handle.
 *
 * # Safety
 * `result` must be NULL or a live handle.
 */
uintptr_t sl_result_curve_len(const SlResult *result);

/**
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
SlStatus sl_result_curve_point(const SlResult *result, uintptr_t index, SlCurvePoint *out);

/**
 * # Safety
 * `result` must be NULL or a handle not yet freed.
 */
void sl_result_free(SlResult *result);

/**
 * Single-look detection probability. `swerling` is 1 to 4.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
SlStatus sl_detection_probability(double snr,
                                  double p_fa,
                                  uint32_t n_cpi,
                                  uint32_t swerling,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEARCHLOAD_H */

/* Copyright 2026 sqzsync Contributors */
/* SPDX-License-Identifier: Apache-2.0 */

#ifndef SQZSYNC_H
#define SQZSYNC_H

/* Generated by cbindgen from sqzsync-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum SqzStatus {
  /**
   * Success; the output pointers hold the results.
   */
  SQZ_STATUS_OK = 0,
  /**
   * A parameter is outside the supported domain.
   */
  SQZ_STATUS_INVALID_PARAM = 1,
  /**
   * A numerical routine failed.
   */
  SQZ_STATUS_NUMERICAL = 2,
  /**
   * A required pointer was null.
   */
  SQZ_STATUS_NULL_POINTER = 3,
} SqzStatus;

/**
 * Opaque validated parameter set `(n, r, Phi, Delta, eps, gamma0)`.
 */
typedef struct SqzParams SqzParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Validates parameters and writes a freshly allocated handle to `out`.
 *
 * # Safety
 * `out` must point to writable memory for one pointer. On `SQZ_STATUS_OK`
 * the written handle owns heap memory and must be released exactly once
 * with [`sqz_params_free`]; on any other status nothing is written.
 */
enum SqzStatus sqz_params_create(double n,
                                 double r,
                                 double phi,
                                 double delta,
                                 double eps,
                                 double gamma0,
                                 struct SqzParams **out);

/**
 * Releases a handle created by [`sqz_params_create`]. Passing null is a
 * no-op.
 *
 * # Safety
 * `p` must be null or a handle obtained from [`sqz_params_create`] that has
 * not been freed before.
 */
void sqz_params_free(struct SqzParams *p);

/**
 * Writes the derived reservoir quantities: effective occupation `N`,
 * squeezing correlation `M` (real and imaginary parts), and total decay
 * rate `gamma = gamma0 (2N + 1)`.
 *
 * # Safety
 * `p` must be a live handle from [`sqz_params_create`]; the four output
 * pointers must each point to writable memory for one double.
 */
enum SqzStatus sqz_derived_reservoir(const struct SqzParams *p,
                                     double *n_eff,
                                     double *m_re,
                                     double *m_im,
                                     double *gamma);

/**
 * Writes the steady-state Bloch vector of the driven, dissipative dynamics.
 *
 * # Safety
 * `p` must be a live handle; `x`, `y`, `z` must each point to writable
 * memory for one double.
 */
enum SqzStatus sqz_steady_state(const struct SqzParams *p, double *x, double *y, double *z);

/**
 * Writes the peak synchronization measure `S_max` of the steady state and
 * the locked phase `phi_star` (in `[0, 2 pi)`; 0 when there is no phase
 * preference).
 *
 * # Safety
 * `p` must be a live handle; `value` and `phi_star` must each point to
 * writable memory for one double.
 */
enum SqzStatus sqz_s_max(const struct SqzParams *p, double *value, double *phi_star);

/**
 * Writes the Husimi `Q` value of the steady state at spherical angles
 * `(theta, phi)`.
 *
 * # Safety
 * `p` must be a live handle; `q` must point to writable memory for one
 * double.
 */
enum SqzStatus sqz_husimi_q(const struct SqzParams *p, double theta, double phi, double *q);

/**
 * Writes the undriven limit-cycle latitude `theta_s` and its planar radius
 * `r_s = (1 + cos theta_s) / 2`.
 *
 * # Safety
 * `p` must be a live handle; `theta_s_out` and `r_s_out` must each point to
 * writable memory for one double.
 */
enum SqzStatus sqz_steady_theta(const struct SqzParams *p, double *theta_s_out, double *r_s_out);

/**
 * Writes the drive strength maximizing `S_max` for the handle's reservoir
 * and detuning, together with the attained `S_max`.
 *
 * # Safety
 * `p` must be a live handle; `eps_out` and `s_max_out` must each point to
 * writable memory for one double.
 */
enum SqzStatus sqz_epsilon_opt(const struct SqzParams *p, double *eps_out, double *s_max_out);

/**
 * Converts a squeezing strength `r` to decibels,
 * `10 log10(e^{2r}) = 20 r / ln 10`.
 *
 * # Safety
 * `db` must point to writable memory for one double.
 */
enum SqzStatus sqz_squeeze_db(double r, double *db);

/**
 * Returns the library version as a static NUL-terminated string.
 */
const char *sqz_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQZSYNC_H */

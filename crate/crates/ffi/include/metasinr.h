#ifndef METASINR_H
#define METASINR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MsInterference {
  /*
   Typical line plus the other lines.
   */
  MS_INTERFERENCE_PLCP = 0,
  /*
   Planar PPP of the same BS density.
   */
  MS_INTERFERENCE_PPP_APPROX = 1,
} MsInterference;

typedef enum MsStatus {
  MS_STATUS_OK = 0,
  MS_STATUS_NULL_POINTER = 1,
  MS_STATUS_DOMAIN = 2,
  MS_STATUS_UNSUPPORTED = 3,
  MS_STATUS_CONVERGENCE = 4,
  MS_STATUS_CONFIG = 5,
  MS_STATUS_PANIC = 6,
} MsStatus;

/*
 Network, channel and numerical settings.
 */
typedef struct MsModel MsModel;

/*
 Result of [`ms_simulate`].
 */
typedef struct MsSimResult MsSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Size of the buffer needed for the last error message, including the
 terminating NUL. Copies as much as fits into `buf` (always NUL-terminated
 when `len > 0`).

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t ms_last_error_message(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *ms_version(void);

/*
 # Safety
 `out` must be a valid pointer to a handle slot.
 */
enum MsStatus ms_model_ppp(double lambda,
                           double alpha,
                           double pt,
                           double sigma2,
                           struct MsModel **out);

/*
 Dedicated link of length `r` km.

 # Safety
 `out` must be a valid pointer to a handle slot.
 */
enum MsStatus ms_model_bipolar(double lambda,
                               double r,
                               double alpha,
                               double pt,
                               double sigma2,
                               struct MsModel **out);

/*
 # Safety
 `out` must be a valid pointer to a handle slot.
 */
enum MsStatus ms_model_mcp(double lambda,
                           double rc,
                           double alpha,
                           double pt,
                           double sigma2,
                           struct MsModel **out);

/*
 `n` tiers with densities `lambdas[i]` and powers `powers[i]`. The tier
 powers replace `pt`.

 # Safety
 `lambdas` and `powers` must point to `n` readable values; `out` to a handle slot.
 */
enum MsStatus ms_model_ktier(const double *lambdas,
                             const double *powers,
                             size_t n,
                             double alpha,
                             double sigma2,
                             struct MsModel **out);

/*
 # Safety
 `out` must be a valid pointer to a handle slot.
 */
enum MsStatus ms_model_plcp(double lambda_l,
                            double lambda_p,
                            double alpha,
                            double pt,
                            double sigma2,
                            struct MsModel **out);

/*
 # Safety
 `model` must be a live handle.
 */
enum MsStatus ms_model_set_interference(struct MsModel *model, enum MsInterference mode);

/*
 # Safety
 `model` must be null or a handle from an `ms_model_*` constructor, not yet freed.
 */
void ms_model_free(struct MsModel *model);

/*
 Dominant-interferer approximation of `P(P_s(θ) > γ)`; θ linear.

 # Safety
 `model` must be a live handle and `out` writable.
 */
enum MsStatus ms_proposed_meta(const struct MsModel *model,
                               double theta,
                               double gamma,
                               double *out);

/*
 Two-moment beta approximation.

 # Safety
 `model` must be a live handle and `out` writable.
 */
enum MsStatus ms_beta_meta(const struct MsModel *model, double theta, double gamma, double *out);

/*
 Gil-Pelaez inversion of the imaginary moments.

 # Safety
 `model` must be a live handle and `out` writable.
 */
enum MsStatus ms_exact_meta(const struct MsModel *model, double theta, double gamma, double *out);

/*
 Nearest-interferer-only closed form; depends only on α.

 # Safety
 `out` must be writable.
 */
enum MsStatus ms_nearest_only_meta(double alpha, double theta, double gamma, double *out);

/*
 Complex moment `M_b(θ)` with `b = b_re + i·b_im`.

 # Safety
 `model` must be a live handle; `out_re` and `out_im` writable.
 */
enum MsStatus ms_moment(const struct MsModel *model,
                        double theta,
                        double b_re,
                        double b_im,
                        double *out_re,
                        double *out_im);

/*
 Monte-Carlo meta distribution at one θ on the given γ grid (strictly
 increasing inside (0,1)). `window_radius <= 0` picks the default.

 # Safety
 `model` must be a live handle, `gammas` must point to `n_gamma` values
 and `out` to a result slot.
 */
enum MsStatus ms_simulate(const struct MsModel *model,
                          double theta,
                          size_t n_realizations,
                          size_t n_links,
                          double window_radius,
                          uint64_t seed,
                          const double *gammas,
                          size_t n_gamma,
                          struct MsSimResult **out);

/*
 Number of γ grid points in a simulation result.

 # Safety
 `res` must be null or a live result.
 */
size_t ms_sim_len(const struct MsSimResult *res);

/*
 Copy the CCDF estimate into `out` (at least [`ms_sim_len`] values).

 # Safety
 `res` must be a live result and `out` must hold `n` values.
 */
enum MsStatus ms_sim_ccdf(const struct MsSimResult *res, double *out, size_t n);

/*
 Copy the per-point standard errors into `out`.

 # Safety
 `res` must be a live result and `out` must hold `n` values.
 */
enum MsStatus ms_sim_std_err(const struct MsSimResult *res, double *out, size_t n);

/*
 Mean per-link success probability and its standard error.

 # Safety
 `res` must be a live result; `mean` and `se` writable.
 */
enum MsStatus ms_sim_mean(const struct MsSimResult *res, double *mean, double *se);

/*
 # Safety
 `res` must be null or a result from [`ms_simulate`], not yet freed.
 */
void ms_sim_free(struct MsSimResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* METASINR_H */

#ifndef SUBWAVE_H
#define SUBWAVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum SwStatus {
  SwOk = 0,
  SwInvalidArgument = 1,
  SwPole = 2,
  SwOverlap = 3,
  SwNoConvergence = 4,
  SwDegenerate = 5,
  SwInternal = 6,
} SwStatus;

/**
 * Resonator arrangement handle.
 */
typedef struct SwConfiguration SwConfiguration;

/**
 * Dispersive material handle.
 */
typedef struct SwMaterial SwMaterial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread, or null when no error occurred.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *sw_last_error_message(void);

/**
 * Create a material; returns null when a parameter is not strictly
 * positive and finite.
 */
struct SwMaterial *sw_material_new(double eps0,
                                   double mu0,
                                   double alpha,
                                   double beta,
                                   double gamma,
                                   double eta);

/**
 * # Safety
 * `handle` must come from [`sw_material_new`] and not be freed twice.
 */
void sw_material_free(struct SwMaterial *handle);

/**
 * eps(omega, k) of the dispersive model.
 *
 * # Safety
 * `mat` must be a live material handle; `out_re`/`out_im` must be
 * writable.
 */
enum SwStatus sw_permittivity(const struct SwMaterial *mat,
                              double omega_re,
                              double omega_im,
                              double k,
                              double *out_re,
                              double *out_im);

/**
 * Permittivity contrast xi(omega, k).
 *
 * # Safety
 * Same contract as [`sw_permittivity`].
 */
enum SwStatus sw_contrast(const struct SwMaterial *mat,
                          double omega_re,
                          double omega_im,
                          double k,
                          double *out_re,
                          double *out_im);

/**
 * Create an empty arrangement at characteristic size `delta`;
 * `dim` is 2 (disks) or 3 (spheres). Null on invalid input.
 */
struct SwConfiguration *sw_configuration_new(double delta, int dim);

/**
 * Append one resonator (centre, radius in unscaled coordinates).
 *
 * # Safety
 * `cfg` must be a live configuration handle.
 */
enum SwStatus sw_configuration_add_disk(struct SwConfiguration *cfg,
                                        double cx,
                                        double cy,
                                        double radius);

/**
 * # Safety
 * `handle` must come from [`sw_configuration_new`] and not be freed twice.
 */
void sw_configuration_free(struct SwConfiguration *handle);

/**
 * Resonant frequencies of the configured system at interior wavenumber
 * `k`. Roots are written in ascending real part into `out_re`/`out_im`
 * with their normalised residuals in `out_residual` (any of the output
 * arrays may be null to skip it); `cap` is their common capacity and
 * `out_len` receives the number of roots found.
 *
 * # Safety
 * Handles must be live; output arrays must hold at least `cap` doubles.
 */
enum SwStatus sw_forward_resonances(const struct SwConfiguration *cfg,
                                    const struct SwMaterial *mat,
                                    double k,
                                    double *out_re,
                                    double *out_im,
                                    double *out_residual,
                                    uintptr_t cap,
                                    uintptr_t *out_len);

/**
 * One point of the inverse-design family: given three target
 * frequencies, the disk radius `rho` and a trial `alpha3`, solve for the
 * characteristic size and the admissible (alpha1, alpha2) branches.
 * Arrays receive up to `cap` branch solutions; `out_len` the count.
 *
 * # Safety
 * `mat` must be live; arrays must hold `cap` doubles each (or be null).
 */
enum SwStatus sw_inverse_design_at(const struct SwMaterial *mat,
                                   double k,
                                   double rho,
                                   double omega1_re,
                                   double omega1_im,
                                   double omega2_re,
                                   double omega2_im,
                                   double omega3_re,
                                   double omega3_im,
                                   double alpha3,
                                   double delta_lo,
                                   double delta_hi,
                                   double *out_delta,
                                   double *out_alpha1,
                                   double *out_alpha2,
                                   double *out_max_residual,
                                   uintptr_t cap,
                                   uintptr_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBWAVE_H */

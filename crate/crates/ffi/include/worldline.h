#ifndef WORLDLINE_H
#define WORLDLINE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum WlStatus {
  WL_STATUS_OK = 0,
  WL_STATUS_NULL_POINTER = 1,
  WL_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad input: malformed JSON, invalid spec, size mismatch.
   */
  WL_STATUS_CONFIG_ERROR = 3,
  /**
   * Eigensolver, integrator or optimizer failure.
   */
  WL_STATUS_NUMERICAL_ERROR = 4,
  WL_STATUS_BUFFER_TOO_SMALL = 5,
  WL_STATUS_PANIC = 6,
} WlStatus;

/**
 * Built Hamiltonian matrix with its metadata.
 */
typedef struct WlHamiltonian WlHamiltonian;

/**
 * Outcome of a variational run.
 */
typedef struct WlVqeResult WlVqeResult;

/**
 * Optimizer knobs. Obtain defaults from [`wl_optimizer_settings_default`].
 */
typedef struct WlOptimizerSettings {
  size_t max_iter;
  double tolerance;
  uint64_t seed;
  size_t restarts;
} WlOptimizerSettings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *wl_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wl_version(void);

/**
 * Builds a Hamiltonian from a JSON spec such as
 * `{"kind":"landau_cartesian","b_field":2.0}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum WlStatus wl_hamiltonian_from_json(const char *json, struct WlHamiltonian **out);

/**
 * # Safety
 * `h` must come from [`wl_hamiltonian_from_json`] and not be used afterwards.
 */
void wl_hamiltonian_free(struct WlHamiltonian *h);

/**
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum WlStatus wl_hamiltonian_dim(const struct WlHamiltonian *h, size_t *out);

/**
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum WlStatus wl_hamiltonian_qubits(const struct WlHamiltonian *h, size_t *out);

/**
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum WlStatus wl_hamiltonian_is_hermitian(const struct WlHamiltonian *h, bool *out);

/**
 * Writes the spectrum, ordered by real part, into `re[0..dim]` and, when
 * `im` is non-null, the imaginary parts into `im[0..dim]`. `len` is the
 * capacity of each buffer.
 *
 * # Safety
 * `h` must be a live handle; `re` (and `im` if non-null) must hold `len`
 * doubles.
 */
enum WlStatus wl_hamiltonian_eigenvalues(const struct WlHamiltonian *h,
                                         double *re,
                                         double *im,
                                         size_t len);

/**
 * Lowest eigenvalue (real part when the matrix is not Hermitian).
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum WlStatus wl_hamiltonian_lowest_eigenvalue(const struct WlHamiltonian *h, double *out);

struct WlOptimizerSettings wl_optimizer_settings_default(void);

/**
 * Runs the variational search with an Ry ansatz of the given depth.
 *
 * # Safety
 * `h` must be a live handle; `settings` must point to a valid struct;
 * `out` must be writable.
 */
enum WlStatus wl_vqe_run(const struct WlHamiltonian *h,
                         size_t depth,
                         const struct WlOptimizerSettings *settings,
                         struct WlVqeResult **out);

/**
 * # Safety
 * `r` must come from [`wl_vqe_run`] and not be used afterwards.
 */
void wl_vqe_free(struct WlVqeResult *r);

/**
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum WlStatus wl_vqe_energy(const struct WlVqeResult *r, double *out);

/**
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum WlStatus wl_vqe_converged(const struct WlVqeResult *r, bool *out);

/**
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum WlStatus wl_vqe_iterations(const struct WlVqeResult *r, size_t *out);

/**
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum WlStatus wl_vqe_param_count(const struct WlVqeResult *r, size_t *out);

/**
 * # Safety
 * `r` must be a live handle; `buf` must hold `len` doubles.
 */
enum WlStatus wl_vqe_params(const struct WlVqeResult *r, double *buf, size_t len);

/**
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum WlStatus wl_vqe_trace_len(const struct WlVqeResult *r, size_t *out);

/**
 * Energies of the accepted optimizer steps, in order.
 *
 * # Safety
 * `r` must be a live handle; `buf` must hold `len` doubles.
 */
enum WlStatus wl_vqe_trace_energies(const struct WlVqeResult *r, double *buf, size_t len);

/**
 * `⟨k1| exp(i p2 X) |k3⟩` between momentum states on an `n`-point grid.
 *
 * # Safety
 * `re` and `im` must be writable.
 */
enum WlStatus wl_vertex_amplitude(size_t k1,
                                  double p2,
                                  size_t k3,
                                  size_t n,
                                  double *re,
                                  double *im);

/**
 * Integrates the radial Wu-Yang equation with RK4 over `steps` intervals
 * and writes the `steps + 1` samples into `r`, `g`, `gprime`, each of
 * capacity `len`.
 *
 * # Safety
 * `r`, `g` and `gprime` must each hold `len` doubles.
 */
enum WlStatus wl_wu_yang_solve(double r_start,
                               double r_end,
                               size_t steps,
                               double g_start,
                               double gprime_start,
                               double *r,
                               double *g,
                               double *gprime,
                               size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WORLDLINE_H */

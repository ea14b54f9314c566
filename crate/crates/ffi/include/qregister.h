#ifndef QREGISTER_H
#define QREGISTER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QrStatus {
  QR_STATUS_OK = 0,
  QR_STATUS_NULL_POINTER = 1,
  QR_STATUS_INVALID_ARGUMENT = 2,
  QR_STATUS_CONFIG = 3,
  QR_STATUS_NUMERICAL = 4,
  QR_STATUS_BUFFER_TOO_SMALL = 5,
  QR_STATUS_UNSUPPORTED = 6,
  QR_STATUS_PANIC = 7,
} QrStatus;

/**
 * Opaque simulator handle.
 */
typedef struct QrSimulator QrSimulator;

/**
 * One time-series row; same columns as the CSV output.
 */
typedef struct QrRecord {
  double t;
  double fidelity;
  double entropy_bits;
  double p0;
  double p1;
  double d_re;
  double d_im;
} QrRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Size of the excitation sector `I` of an `N`-qubit, `N_b`-mode register.
 *
 * # Safety
 * `out` must be valid for writing one `uint64_t`.
 */
enum QrStatus qr_sector_dimension(size_t n_qubits,
                                  size_t n_modes,
                                  size_t excitations,
                                  uint64_t *out);

/**
 * Uniform coupling `g0` to every mode, linear dispersion.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum QrStatus qr_simulator_new_uniform(size_t n_qubits,
                                       size_t n_modes,
                                       double epsilon,
                                       double g0,
                                       struct QrSimulator **out);

/**
 * Cosine coupling profile with coherence length `xi`, linear dispersion.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum QrStatus qr_simulator_new_cosine(size_t n_qubits,
                                      size_t n_modes,
                                      double epsilon,
                                      double g0,
                                      double xi,
                                      struct QrSimulator **out);

/**
 * Parses a configuration document. Relative file references resolve
 * against `base_dir`, which may be null.
 *
 * # Safety
 * `text` and a non-null `base_dir` must be NUL-terminated UTF-8 strings;
 * `out` must be valid for writing one pointer.
 */
enum QrStatus qr_simulator_from_config(const char *text,
                                       const char *base_dir,
                                       struct QrSimulator **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `sim` must come from a constructor of this library and not be used
 * afterwards.
 */
void qr_simulator_free(struct QrSimulator *sim);

/**
 * Dimension `N + N_b` of the one-excitation space.
 *
 * # Safety
 * `sim` must be a live handle; `out` valid for one `size_t`.
 */
enum QrStatus qr_simulator_dimension(const struct QrSimulator *sim, size_t *out);

/**
 * Copies the ascending eigenvalues into `buf`, which must hold at least
 * `qr_simulator_dimension` values.
 *
 * # Safety
 * `sim` must be a live handle; `buf` valid for `len` doubles.
 */
enum QrStatus qr_simulator_eigenvalues(const struct QrSimulator *sim, double *buf, size_t len);

/**
 * Copies the `N_b + 1` symmetric-sector energies into `buf`. Fails with
 * `QR_STATUS_UNSUPPORTED` when the couplings depend on the qubit.
 *
 * # Safety
 * `sim` must be a live handle; `buf` valid for `len` doubles.
 */
enum QrStatus qr_simulator_secular_roots(const struct QrSimulator *sim, double *buf, size_t len);

/**
 * Evolves the register from the spin amplitudes `re[i] + i im[i]`
 * (renormalized) on the grid `t_j = j t_max / (n_steps - 1)` and writes
 * `n_steps` records.
 *
 * # Safety
 * `sim` must be a live handle; `re` and `im` valid for `n_amplitudes`
 * doubles; `out` valid for `out_len` records.
 */
enum QrStatus qr_simulator_run(const struct QrSimulator *sim,
                               const double *re,
                               const double *im,
                               size_t n_amplitudes,
                               double t_max,
                               size_t n_steps,
                               struct QrRecord *out,
                               size_t out_len);

/**
 * Runs the preparation and grid of the configuration the handle was
 * created from. `out` must hold `grid.n_steps` records.
 *
 * # Safety
 * `sim` must be a live handle; `out` valid for `out_len` records.
 */
enum QrStatus qr_simulator_run_config(const struct QrSimulator *sim,
                                      struct QrRecord *out,
                                      size_t out_len);

/**
 * Copies the calling thread's last error message, NUL-terminated and
 * truncated to `len - 1` bytes. Returns the full message length without
 * the terminator, so a return value `>= len` signals truncation.
 *
 * # Safety
 * A non-null `buf` must be valid for `len` bytes.
 */
size_t qr_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QREGISTER_H */

#ifndef RMS_FFI_H
#define RMS_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum RmsStatus {
  RMS_STATUS_OK = 0,
  RMS_STATUS_NULL_POINTER = 1,
  RMS_STATUS_INVALID_ARGUMENT = 2,
  RMS_STATUS_INVALID_CONFIG = 3,
  RMS_STATUS_UNKNOWN_CONFIG_KEY = 4,
  RMS_STATUS_DIMENSION_MISMATCH = 5,
  RMS_STATUS_UNREACHABLE_AMPLITUDE = 6,
  RMS_STATUS_BUFFER_TOO_SMALL = 7,
  RMS_STATUS_IO = 8,
  RMS_STATUS_NUMERICAL = 9,
  RMS_STATUS_PANIC = 10,
} RmsStatus;

typedef enum RmsScenario {
  RMS_SCENARIO_DOWNLINK = 0,
  RMS_SCENARIO_UPLINK = 1,
} RmsScenario;

/**
 * Sweep configuration handle.
 */
typedef struct RmsConfig RmsConfig;

/**
 * One sampled channel realization together with the system it was drawn for.
 */
typedef struct RmsRealization RmsRealization;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *rms_last_error_message(void);

/**
 * Default configuration. Never null.
 */
struct RmsConfig *rms_config_default(void);

/**
 * Parses `key = value` text into a new handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RmsStatus rms_config_parse(const char *text, struct RmsConfig **out);

/**
 * Reads a config file into a new handle.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RmsStatus rms_config_read(const char *path, struct RmsConfig **out);

/**
 * Overrides trial count and master seed.
 *
 * # Safety
 * `config` must be a live handle.
 */
enum RmsStatus rms_config_set_trials(struct RmsConfig *config, size_t trials, uint64_t master_seed);

/**
 * # Safety
 * `config` must be null or a handle not yet freed.
 */
void rms_config_free(struct RmsConfig *config);

/**
 * `2D²/λ`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RmsStatus rms_rayleigh_distance(double aperture, double wavelength, double *out);

/**
 * Order-`l` Fourier coefficient of the gating waveform `(t_on, tau, period)`.
 *
 * # Safety
 * `out_re` and `out_im` must be valid pointers.
 */
enum RmsStatus rms_harmonic_coefficient(double t_on,
                                        double tau,
                                        double period,
                                        uint32_t l,
                                        double *out_re,
                                        double *out_im);

/**
 * Gating waveform whose first harmonic equals `re + j·im`.
 *
 * # Safety
 * `out_t_on` and `out_tau` must be valid pointers.
 */
enum RmsStatus rms_design_gating(double re,
                                 double im,
                                 double period,
                                 double *out_t_on,
                                 double *out_tau);

/**
 * Samples a realization for `num_elements` elements with the given seed.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum RmsStatus rms_realization_sample(const struct RmsConfig *config,
                                      size_t num_elements,
                                      uint64_t seed,
                                      struct RmsRealization **out);

/**
 * # Safety
 * `real` must be a live handle; the out pointers must be valid.
 */
enum RmsStatus rms_realization_dims(const struct RmsRealization *real,
                                    size_t *out_users,
                                    size_t *out_elements);

/**
 * Copies user `k`'s cascaded channel into `re` and `im`, each of length `len`
 * (at least the element count).
 *
 * # Safety
 * `real` must be a live handle; `re` and `im` must hold `len` doubles.
 */
enum RmsStatus rms_realization_cascaded(const struct RmsRealization *real,
                                        size_t k,
                                        double *re,
                                        double *im,
                                        size_t len);

/**
 * # Safety
 * `real` must be null or a handle not yet freed.
 */
void rms_realization_free(struct RmsRealization *real);

/**
 * Downlink design on a realization. Writes the sum-rate and, when
 * `powers` is non-null, the `K` per-user powers.
 *
 * # Safety
 * `real` must be a live handle; `out_sum_rate` valid; `powers` null or
 * holding `powers_len` doubles.
 */
enum RmsStatus rms_dl_optimize(const struct RmsRealization *real,
                               double *out_sum_rate,
                               double *powers,
                               size_t powers_len);

/**
 * Uplink design on a realization. Writes the sum-rate.
 *
 * # Safety
 * `real` must be a live handle and `out_sum_rate` valid.
 */
enum RmsStatus rms_ul_optimize(const struct RmsRealization *real, double *out_sum_rate);

/**
 * Runs a full sweep and writes the CSV to `out_path`.
 *
 * # Safety
 * `config` must be a live handle and `out_path` a valid NUL-terminated string.
 */
enum RmsStatus rms_run_sweep(const struct RmsConfig *config,
                             enum RmsScenario scenario,
                             const char *out_path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RMS_FFI_H */

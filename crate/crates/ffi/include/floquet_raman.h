#ifndef FLOQUET_RAMAN_H
#define FLOQUET_RAMAN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>
#include <stddef.h>

/**
 * Result of every fallible call.
 */
typedef enum FrStatus {
  FR_STATUS_OK = 0,
  FR_STATUS_NULL_POINTER = 1,
  FR_STATUS_INVALID_PARAMETER = 2,
  FR_STATUS_DEGENERATE_SYSTEM = 3,
  FR_STATUS_STEP_UNDERFLOW = 4,
  FR_STATUS_PRECONDITION_VIOLATED = 5,
  FR_STATUS_NOT_NEAR_RESONANCE = 6,
  FR_STATUS_NO_PEAK_FOUND = 7,
  FR_STATUS_FILTER_BANDS_OVERLAP = 8,
  FR_STATUS_FIT_FAILED = 9,
  FR_STATUS_BUFFER_TOO_SMALL = 10,
  FR_STATUS_PANIC = 11,
} FrStatus;

/**
 * How [`fr_raman_rabi_frequency`] obtains the Raman Rabi frequency.
 */
typedef enum FrRabiMethod {
  FR_RABI_METHOD_LADDER = 0,
  FR_RABI_METHOD_QUASIENERGY_GAP = 1,
  FR_RABI_METHOD_TIME_FIT = 2,
} FrRabiMethod;

/**
 * Which series [`fr_trace_copy`] reads.
 */
typedef enum FrSeries {
  /**
   * Sample times in seconds.
   */
  FR_SERIES_TIMES = 0,
  /**
   * Population of `|0⟩`.
   */
  FR_SERIES_P0 = 1,
  /**
   * Population of the lower eigenstate `|−⟩`.
   */
  FR_SERIES_LOWER = 2,
} FrSeries;

/**
 * Drive parameters `(Δz, Δx, A, ω)` plus optional phase modulation.
 */
typedef struct FrDrive FrDrive;

/**
 * A noiseless population trace.
 */
typedef struct FrTrace FrTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fr_version(void);

/**
 * Copies the last error message of the calling thread into `buf`
 * (NUL-terminated, truncated to `len − 1` bytes) and returns the full
 * message length excluding the NUL. Returns 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t fr_last_error_message(char *buf, size_t len);

/**
 * Creates a drive. Frequencies in rad/s.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum FrStatus fr_drive_new(double delta_z,
                           double delta_x,
                           double amp_a,
                           double omega,
                           struct FrDrive **out);

/**
 * Turns on phase modulation `φ(t) = ωt + (a/ν) sin νt`; `a = 0`
 * switches it off.
 *
 * # Safety
 * `drive` must come from [`fr_drive_new`].
 */
enum FrStatus fr_drive_set_phase_modulation(struct FrDrive *drive, double a, double nu);

/**
 * Releases a drive. Null is ignored.
 *
 * # Safety
 * `drive` must come from [`fr_drive_new`] and not be used afterwards.
 */
void fr_drive_free(struct FrDrive *drive);

/**
 * Mixing angle θ and level splitting ω₀ of the static Hamiltonian.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FrStatus fr_eigenbasis(const struct FrDrive *drive, double *theta, double *omega0);

/**
 * The two quasienergies folded into `[−ω/2, ω/2)`, written to `out[0..2]`.
 *
 * # Safety
 * `out` must be valid for two writes.
 */
enum FrStatus fr_quasienergies(const struct FrDrive *drive, double tol, double *out);

/**
 * Distance between the two quasienergies on the zone circle.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FrStatus fr_quasienergy_gap(const struct FrDrive *drive, double tol, double *out);

/**
 * Bare resonance ω₀/m.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FrStatus fr_resonance_frequency(const struct FrDrive *drive, unsigned int m, double *out);

/**
 * Drive frequency of maximal order-`m` transfer within `ω₀/m ± width`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FrStatus fr_resonance_locate(const struct FrDrive *drive,
                                  unsigned int m,
                                  double width,
                                  double *out);

/**
 * On-resonance Raman Rabi frequency Ω_F of order `m`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FrStatus fr_raman_rabi_frequency(const struct FrDrive *drive,
                                      unsigned int m,
                                      enum FrRabiMethod method,
                                      double *out);

/**
 * Traditional adiabaticity parameter of the weak drive.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FrStatus fr_adiabaticity(const struct FrDrive *drive, double *out);

/**
 * Noiseless Floquet Raman experiment: a `Y_θ` pulse of Rabi amplitude
 * `prep_rabi` followed by the drive. `times` are measured from the drive
 * start. A negative `prep_theta` prepares the upper band `|+⟩`.
 *
 * # Safety
 * `times` must be valid for `n` reads and `out` for one write.
 */
enum FrStatus fr_simulate_floquet_raman(const struct FrDrive *drive,
                                        double prep_theta,
                                        double prep_rabi,
                                        const double *times,
                                        size_t n,
                                        double tol,
                                        struct FrTrace **out);

/**
 * Number of samples in a trace; 0 for null.
 *
 * # Safety
 * `trace` must be null or come from a producing call.
 */
size_t fr_trace_len(const struct FrTrace *trace);

/**
 * Copies one series into `buf`, which must hold [`fr_trace_len`] values.
 *
 * # Safety
 * `buf` must be valid for `len` writes.
 */
enum FrStatus fr_trace_copy(const struct FrTrace *trace,
                            enum FrSeries series,
                            double *buf,
                            size_t len);

/**
 * Releases a trace. Null is ignored.
 *
 * # Safety
 * `trace` must come from a producing call and not be used afterwards.
 */
void fr_trace_free(struct FrTrace *trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLOQUET_RAMAN_H */

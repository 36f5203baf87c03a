#ifndef MACSIG_H
#define MACSIG_H

/* Generated by cbindgen from macsig-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome category of an FFI call.
 */
typedef enum {
  MACSIG_STATUS_OK = 0,
  /**
   * A parameter violated its domain constraint.
   */
  MACSIG_STATUS_DOMAIN_ERROR = 1,
  /**
   * The operation is only defined in a different prior/noise case.
   */
  MACSIG_STATUS_CASE_ERROR = 2,
  /**
   * Root isolation failed to produce a structurally valid root set.
   */
  MACSIG_STATUS_CONVERGENCE_ERROR = 3,
  /**
   * A requested amplitude exceeds the sensor's power cap.
   */
  MACSIG_STATUS_CAP_ERROR = 4,
  /**
   * The scheme does not support the requested operation.
   */
  MACSIG_STATUS_SCHEME_ERROR = 5,
  /**
   * An output stream could not be read or written.
   */
  MACSIG_STATUS_IO_ERROR = 6,
  /**
   * A required pointer argument was null.
   */
  MACSIG_STATUS_NULL_POINTER = 7,
  /**
   * The library panicked; treat the handle as poisoned.
   */
  MACSIG_STATUS_PANIC = 8,
} MacsigStatus;

/**
 * Which of the three prior/noise regimes the parameters fall in.
 */
typedef enum {
  MACSIG_CASE_I = 1,
  MACSIG_CASE_II = 2,
  MACSIG_CASE_III = 3,
} MacsigCase;

/**
 * Amplitude selection rule for noise sweeps and limits.
 */
typedef enum {
  /**
   * The cap-constrained optimal allocation.
   */
  MACSIG_POLICY_OPTIMAL = 0,
  /**
   * Both sensors at full cap power.
   */
  MACSIG_POLICY_BOTH_MAX = 1,
  /**
   * Sensor 1 at full cap power, sensor 2 silent.
   */
  MACSIG_POLICY_SENSOR1_ONLY = 2,
  /**
   * Sensor 2 at full cap power, sensor 1 silent.
   */
  MACSIG_POLICY_SENSOR2_ONLY = 3,
} MacsigPolicy;

/**
 * Signaling schemes available to the Monte Carlo simulator.
 */
typedef enum {
  /**
   * Skewed pairs on the shared channel at a chosen allocation.
   */
  MACSIG_SCHEME_MAC_OPTIMAL_ASYM = 0,
  /**
   * Symmetric pairs at full cap power on the shared channel.
   */
  MACSIG_SCHEME_MAC_SYMMETRIC_MAX = 1,
  /**
   * Symmetric BPSK at full cap power, one channel per sensor.
   */
  MACSIG_SCHEME_ORTH_SYMMETRIC_BPSK = 2,
  /**
   * Skewed pairs at full cap power, one channel per sensor.
   */
  MACSIG_SCHEME_ORTH_ASYMMETRIC_BPSK = 3,
} MacsigScheme;

/**
 * Opaque handle to a validated parameter set.
 */
typedef struct MacsigParams MacsigParams;

/**
 * Prior classification against the two case thresholds.
 */
typedef struct {
  MacsigCase case_;
  double lower_threshold;
  double upper_threshold;
} MacsigClassification;

/**
 * Cap-constrained optimal design and the error probability it achieves.
 */
typedef struct {
  MacsigCase case_;
  /**
   * Optimal amplitude scales; mean transmit powers are their squares.
   */
  double p1_star;
  double p2_star;
  double pe_star;
  /**
   * True when the power cap, rather than an interior optimum, sets
   * `p2_star`.
   */
  bool p2_capped;
} MacsigAllocation;

/**
 * Empirical error rate with a binomial confidence interval.
 */
typedef struct {
  uint64_t errors;
  uint64_t trials;
  /**
   * `errors / trials`.
   */
  double pe_hat;
  /**
   * 95% half-width under the normal approximation.
   */
  double ci95_halfwidth;
  uint64_t seed;
  /**
   * False when either error count is too small for the normal
   * approximation.
   */
  bool ci_reliable;
} MacsigSimReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Detail message for the most recent failing call on this thread.
 *
 * The pointer stays valid until the next failing call on the same
 * thread. Never returns null; before any failure it points at an empty
 * string.
 */
const char *macsig_last_error_message(void);

/**
 * Static name of a status code, e.g. `"domain error"`.
 */
const char *macsig_status_name(MacsigStatus status);

/**
 * Validates a parameter set and writes a heap-allocated handle to
 * `out`. On any failure `out` is left untouched.
 *
 * # Safety
 * `out` must be a valid pointer. The handle must be released with
 * [`macsig_params_free`] exactly once.
 */
MacsigStatus macsig_params_new(double p1,
                               double eps1,
                               double eps2,
                               double n0,
                               double p1max,
                               double p2max,
                               MacsigParams **out);

/**
 * Releases a handle from [`macsig_params_new`]. Null is a no-op.
 *
 * # Safety
 * `params` must be null or a handle not yet freed; the handle must not
 * be used afterwards.
 */
void macsig_params_free(MacsigParams *params);

/**
 * Classifies the prior against the two case thresholds.
 *
 * # Safety
 * `params` must be a live handle and `out` a valid pointer.
 */
MacsigStatus macsig_classify(const MacsigParams *params, MacsigClassification *out);

/**
 * Writes the interior-optimal sensor 2 amplitude for sensor 1 amplitude
 * `pa1`. Only defined in Case III.
 *
 * # Safety
 * `params` must be a live handle and `out` a valid pointer.
 */
MacsigStatus macsig_p2_tilde(const MacsigParams *params, double pa1, double *out);

/**
 * Writes the cap-constrained optimal allocation and its exact error
 * probability.
 *
 * # Safety
 * `params` must be a live handle and `out` a valid pointer.
 */
MacsigStatus macsig_optimal_allocation(const MacsigParams *params, MacsigAllocation *out);

/**
 * Writes the exact detection error probability at amplitudes
 * `(pa1, pa2)`.
 *
 * # Safety
 * `params` must be a live handle and `out_pe` a valid pointer.
 */
MacsigStatus macsig_error_probability(const MacsigParams *params,
                                      double pa1,
                                      double pa2,
                                      double *out_pe);

/**
 * Writes the decision boundary points, ascending, into `out_roots`
 * (capacity for 3 values) and their count into `out_count`.
 *
 * # Safety
 * `params` must be a live handle, `out_roots` must point at at least 3
 * writable doubles, and `out_count` must be a valid pointer.
 */
MacsigStatus macsig_boundaries(const MacsigParams *params,
                               double pa1,
                               double pa2,
                               double *out_roots,
                               uintptr_t *out_count);

/**
 * Noise-free limit of the error probability under `policy`. Returns NaN
 * if `params` is null.
 *
 * # Safety
 * `params` must be null or a live handle.
 */
double macsig_high_snr_limit(const MacsigParams *params, MacsigPolicy policy);

/**
 * Runs a seeded Monte Carlo simulation and writes the report to `out`.
 * `alloc1`/`alloc2` are the amplitude scales for
 * [`MacsigScheme::MacOptimalAsym`]; every other scheme transmits at full
 * cap power and ignores them.
 *
 * # Safety
 * `params` must be a live handle and `out` a valid pointer.
 */
MacsigStatus macsig_simulate(const MacsigParams *params,
                             MacsigScheme scheme,
                             double alloc1,
                             double alloc2,
                             uint64_t trials,
                             uint64_t seed,
                             MacsigSimReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MACSIG_H */

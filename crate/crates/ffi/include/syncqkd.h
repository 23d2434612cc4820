#ifndef SYNCQKD_H
#define SYNCQKD_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SyncqkdStatus {
  SYNCQKD_STATUS_OK = 0,
  SYNCQKD_STATUS_NULL_POINTER = 1,
  SYNCQKD_STATUS_INPUT_DOMAIN = 2,
  SYNCQKD_STATUS_VALIDATION = 3,
  SYNCQKD_STATUS_CONSISTENCY = 4,
  SYNCQKD_STATUS_PRECONDITION = 5,
  SYNCQKD_STATUS_ESTIMATION_UNDEFINED = 6,
  SYNCQKD_STATUS_SINGULAR = 7,
  SYNCQKD_STATUS_NO_THRESHOLD = 8,
  SYNCQKD_STATUS_PARSE = 9,
  SYNCQKD_STATUS_IO = 10,
  SYNCQKD_STATUS_PANIC = 11,
} SyncqkdStatus;

typedef enum SyncqkdVariant {
  SYNCQKD_VARIANT_A = 0,
  SYNCQKD_VARIANT_B = 1,
} SyncqkdVariant;

/**
 * Opaque correlation table.
 */
typedef struct SyncqkdCorrelation SyncqkdCorrelation;

/**
 * Opaque protocol run result.
 */
typedef struct SyncqkdOutcome SyncqkdOutcome;

typedef struct SyncqkdBellReport {
  double j[4];
  bool classical;
  bool quantum_feasible;
  /**
   * Index of the most negative violated functional, or -1.
   */
  int32_t violated_index;
} SyncqkdBellReport;

typedef struct SyncqkdProtocolConfig {
  enum SyncqkdVariant variant;
  uint64_t n;
  uint64_t m;
  double lambda;
  double mu;
  uint64_t seed;
  double input_distribution[3];
  bool abort_on_mismatch;
} SyncqkdProtocolConfig;

typedef struct SyncqkdRigidityReport {
  size_t d;
  double j3;
  double lambda;
  double l_over_d;
  double trace_deviation;
  double statistical_difference;
  double margin_junk;
  double margin_deviation;
  double margin_statistical;
  double identity_residual;
  bool passed;
} SyncqkdRigidityReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Owned by the
 * library and valid until the next failing call on the same thread.
 */
const char *syncqkd_last_error_message(void);

/**
 * Static NUL-terminated version string.
 */
const char *syncqkd_version(void);

void syncqkd_string_free(char *s);

enum SyncqkdStatus syncqkd_correlation_ideal(struct SyncqkdCorrelation **out);

enum SyncqkdStatus syncqkd_correlation_uniform(struct SyncqkdCorrelation **out);

/**
 * Builds a table from `len == 36` entries in `(2 y_A + y_B) * 9 + 3 x_A + x_B` order.
 */
enum SyncqkdStatus syncqkd_correlation_from_table(const double *table,
                                                  size_t len,
                                                  struct SyncqkdCorrelation **out);

void syncqkd_correlation_free(struct SyncqkdCorrelation *c);

/**
 * Copies the 36 entries into `out`.
 */
enum SyncqkdStatus syncqkd_correlation_table(const struct SyncqkdCorrelation *c, double *out);

enum SyncqkdStatus syncqkd_j3_effective(const struct SyncqkdCorrelation *c, double *out);

enum SyncqkdStatus syncqkd_asynchronicity(const struct SyncqkdCorrelation *c, double *out);

enum SyncqkdStatus syncqkd_classify(const struct SyncqkdCorrelation *c,
                                    struct SyncqkdBellReport *out);

/**
 * Defaults: n = 100000, m = 10, λ = μ = 0.01, seed 0, uniform inputs.
 */
struct SyncqkdProtocolConfig syncqkd_protocol_config_default(enum SyncqkdVariant variant);

/**
 * Runs a protocol against a device whose behavior is the given table.
 */
enum SyncqkdStatus syncqkd_simulate(const struct SyncqkdProtocolConfig *config,
                                    const struct SyncqkdCorrelation *device,
                                    struct SyncqkdOutcome **out);

void syncqkd_outcome_free(struct SyncqkdOutcome *o);

enum SyncqkdStatus syncqkd_outcome_accepted(const struct SyncqkdOutcome *o, bool *out);

enum SyncqkdStatus syncqkd_outcome_j3_hat(const struct SyncqkdOutcome *o, double *out);

/**
 * Writes the asynchronicity estimate and whether one exists (variant B only).
 */
enum SyncqkdStatus syncqkd_outcome_s_hat(const struct SyncqkdOutcome *o,
                                         bool *has_value,
                                         double *out);

enum SyncqkdStatus syncqkd_outcome_key_mismatches(const struct SyncqkdOutcome *o, uint64_t *out);

enum SyncqkdStatus syncqkd_outcome_key_len(const struct SyncqkdOutcome *o, size_t *out);

/**
 * Copies up to `cap` key bits (one per byte) into `buf` and reports how many were written.
 */
enum SyncqkdStatus syncqkd_outcome_key_bits(const struct SyncqkdOutcome *o,
                                            uint8_t *buf,
                                            size_t cap,
                                            size_t *written);

/**
 * The outcome summary document. Free with [`syncqkd_string_free`].
 */
enum SyncqkdStatus syncqkd_outcome_to_json(const struct SyncqkdOutcome *o, char **out);

/**
 * Toeplitz hash of `n` key bits down to `out_len` bits written into `out`.
 */
enum SyncqkdStatus syncqkd_privacy_amplify(const uint8_t *key,
                                           size_t n,
                                           size_t out_len,
                                           uint64_t seed,
                                           uint8_t *out);

enum SyncqkdStatus syncqkd_eve_epsilon_max(double lambda, double mu, double *out);

enum SyncqkdStatus syncqkd_eve_epsilon_delta_max(double delta,
                                                 double lambda,
                                                 double mu,
                                                 double *out);

/**
 * Expected observed `(J_3, S)` for a strategy with `(j3, s)` at uncertainty `epsilon`.
 */
enum SyncqkdStatus syncqkd_eve_forward(double j3,
                                       double s,
                                       double epsilon,
                                       double *out_j3,
                                       double *out_s);

/**
 * Eve's `(J̃_3, S̃)` given observed `J_3 = -1/8 + lambda` and `S = mu`.
 */
enum SyncqkdStatus syncqkd_eve_invert(double lambda,
                                      double mu,
                                      double epsilon,
                                      double *out_j3,
                                      double *out_s);

/**
 * Verifies the bounds on the form with junk dimensions `l[4]` and `k` block angles.
 */
enum SyncqkdStatus syncqkd_rigidity_verify(const size_t *l,
                                           const double *angles,
                                           size_t k,
                                           struct SyncqkdRigidityReport *out);

/**
 * Copies the last error message into a caller buffer, NUL-terminated and
 * truncated to `cap`. Returns the full message length, or 0 if none.
 */
size_t syncqkd_last_error_copy(char *buf, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYNCQKD_H */

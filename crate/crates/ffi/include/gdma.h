#ifndef GDMA_H
#define GDMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GdmaEnergy {
  GDMA_ENERGY_CHANNEL_BIT = 0,
  GDMA_ENERGY_PAYLOAD_BIT = 1,
} GdmaEnergy;

typedef enum GdmaMode {
  GDMA_MODE_FULL = 0,
  GDMA_MODE_COMPRESSED = 1,
} GdmaMode;

typedef enum GdmaModulation {
  GDMA_MODULATION_BPSK = 0,
  GDMA_MODULATION_QPSK = 1,
  GDMA_MODULATION_PSK8 = 2,
  GDMA_MODULATION_QAM16 = 3,
  GDMA_MODULATION_QAM32 = 4,
  GDMA_MODULATION_QAM64 = 5,
} GdmaModulation;

typedef enum GdmaStatus {
  GDMA_STATUS_OK = 0,
  GDMA_STATUS_NULL_POINTER = 1,
  GDMA_STATUS_INVALID_ARGUMENT = 2,
  GDMA_STATUS_INVALID_FIELD = 3,
  GDMA_STATUS_INVALID_TRANSFORM = 4,
  GDMA_STATUS_INVALID_CODE = 5,
  GDMA_STATUS_INVALID_LINK = 6,
  GDMA_STATUS_INVALID_FRAME = 7,
  GDMA_STATUS_INVALID_SIMULATION = 8,
  GDMA_STATUS_BUFFER_TOO_SMALL = 9,
  GDMA_STATUS_PANIC = 10,
} GdmaStatus;

typedef enum GdmaTransformKind {
  GDMA_TRANSFORM_KIND_FOURIER = 0,
  GDMA_TRANSFORM_KIND_HARTLEY = 1,
} GdmaTransformKind;

/**
 * GF(p^m) with table arithmetic.
 */
typedef struct GdmaField GdmaField;

/**
 * A configured multiplexing link.
 */
typedef struct GdmaLink GdmaLink;

/**
 * Link parameters. `p`, `m` apply to the Fourier transform (default
 * polynomial), `q` to the Hartley transform. `n_users` of 0 means the full
 * group order. The transcoder is the default for the field.
 */
typedef struct GdmaLinkConfig {
  enum GdmaTransformKind transform;
  uint32_t p;
  uint32_t m;
  uint32_t q;
  size_t n_users;
  enum GdmaMode mode;
  enum GdmaModulation modulation;
  enum GdmaEnergy energy;
} GdmaLinkConfig;

typedef struct GdmaBerRecord {
  double ebn0_db;
  uint64_t bits_observed;
  uint64_t bit_errors;
  double ber;
  uint64_t symbols_observed;
  uint64_t symbol_errors;
  double ser;
  uint64_t frames;
  uint64_t frame_errors;
  double fer;
  double ci_low;
  double ci_high;
  uint64_t seed;
  bool budget_exhausted;
} GdmaBerRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. Valid
 * until the next failing call on the same thread.
 */
const char *gdma_last_error(void);

const char *gdma_version(void);

/**
 * Builds GF(p^m). `poly` holds m+1 coefficients low to high; pass null to
 * use the shipped polynomial.
 */
enum GdmaStatus gdma_field_new(uint32_t p,
                               uint32_t m,
                               const uint32_t *poly,
                               size_t poly_len,
                               struct GdmaField **field);

void gdma_field_free(struct GdmaField *field);

/**
 * Number of elements, or 0 for a null handle.
 */
uint64_t gdma_field_size(const struct GdmaField *field);

enum GdmaStatus gdma_field_add(const struct GdmaField *field,
                               uint32_t a,
                               uint32_t b,
                               uint32_t *result);

enum GdmaStatus gdma_field_mul(const struct GdmaField *field,
                               uint32_t a,
                               uint32_t b,
                               uint32_t *result);

enum GdmaStatus gdma_field_div(const struct GdmaField *field,
                               uint32_t a,
                               uint32_t b,
                               uint32_t *result);

enum GdmaStatus gdma_field_pow(const struct GdmaField *field,
                               uint32_t a,
                               uint64_t e,
                               uint32_t *result);

/**
 * Multiplicative order of a nonzero element.
 */
enum GdmaStatus gdma_field_order(const struct GdmaField *field, uint32_t a, uint64_t *order);

/**
 * Number of cyclotomic cosets of `k -> p·k mod n` and `γ_cc = n/ν` as a
 * reduced fraction.
 */
enum GdmaStatus gdma_gamma_cc(size_t n, uint32_t p, size_t *nu, uint64_t *numer, uint64_t *denom);

/**
 * `log_p(1 + snr)` for linear `snr`.
 */
enum GdmaStatus gdma_shannon_bound(double snr, uint32_t p, double *gamma_max);

/**
 * h for a built-in code name ("A'", "B", "direct(2,4)") under uniform bits.
 */
enum GdmaStatus gdma_h_param(const char *code, enum GdmaModulation modulation, double *h);

enum GdmaStatus gdma_frame_error_bound(size_t n_users, double h, double pe1, double *bound);

/**
 * 95% Wilson score interval.
 */
enum GdmaStatus gdma_confidence_interval(uint64_t errors,
                                         uint64_t trials,
                                         double *low,
                                         double *high);

enum GdmaStatus gdma_link_new(const struct GdmaLinkConfig *config, struct GdmaLink **link);

void gdma_link_free(struct GdmaLink *link);

/**
 * Users per frame, or 0 for a null handle.
 */
size_t gdma_link_n_users(const struct GdmaLink *link);

/**
 * Upper bound on the bits a frame can occupy.
 */
size_t gdma_link_max_frame_bits(const struct GdmaLink *link);

/**
 * Multiplexes one ground symbol per user into frame bits (one byte per
 * bit). `written` receives the frame length; if `capacity` is too small the
 * call fails with `BUFFER_TOO_SMALL` and `written` holds the needed size.
 */
enum GdmaStatus gdma_link_mux(const struct GdmaLink *link,
                              const uint32_t *users,
                              size_t n_users,
                              uint8_t *bits,
                              size_t capacity,
                              size_t *written);

/**
 * Recovers the users from frame bits. `undecodable` and `out_of_subfield`
 * may be null.
 */
enum GdmaStatus gdma_link_demux(const struct GdmaLink *link,
                                const uint8_t *bits,
                                size_t n_bits,
                                uint32_t *users,
                                size_t n_users,
                                size_t *undecodable,
                                size_t *out_of_subfield);

/**
 * Runs one Monte Carlo point of the configured link.
 */
enum GdmaStatus gdma_run_point(const struct GdmaLinkConfig *config,
                               double ebn0_db,
                               uint64_t min_bits,
                               uint64_t min_errors,
                               uint64_t max_bits,
                               uint64_t seed,
                               size_t workers,
                               struct GdmaBerRecord *record);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GDMA_H */

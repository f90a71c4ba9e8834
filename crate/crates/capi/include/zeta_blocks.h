#ifndef ZETA_BLOCKS_H
#define ZETA_BLOCKS_H

/* Generated from the zeta-blocks-capi crate by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every C-ABI call.
 */
typedef enum ZbStatus {
  /**
   * The call succeeded.
   */
  ZB_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  ZB_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument failed to parse or violated a documented precondition.
   */
  ZB_STATUS_INVALID_INPUT = 2,
  /**
   * The requested value diverges and has no finite evaluation.
   */
  ZB_STATUS_DIVERGENT = 3,
  /**
   * An internal enumeration or evaluation budget was exceeded.
   */
  ZB_STATUS_BUDGET_EXCEEDED = 4,
  /**
   * The caller-provided buffer is too small; the required size was
   * written to the size output parameter.
   */
  ZB_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * The certificate has no numeric record yet; call
   * `zb_certificate_verify` first.
   */
  ZB_STATUS_NOT_VERIFIED = 6,
  /**
   * An internal invariant failed; please report. Details are in
   * `zb_last_error_message`.
   */
  ZB_STATUS_INTERNAL_PANIC = 7,
} ZbStatus;

/**
 * An identity certificate: block lengths, the star-index left side, the
 * formal right side, and (after verification) a numeric record. Opaque to
 * C callers.
 */
typedef struct ZbCertificate ZbCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *zb_version(void);

/**
 * A static description of a status code; do not free.
 */
const char *zb_status_message(enum ZbStatus status);

/**
 * Detail of the most recent failure on this thread; empty if none. The
 * pointer stays valid until the next zeta-blocks call on the same thread.
 * Do not free.
 */
const char *zb_last_error_message(void);

/**
 * Decomposes the binary word `word` (an ASCII string of `0`s and `1`s)
 * into its block lengths.
 *
 * Writes the number of blocks to `*written`. When `out` is non-NULL and
 * `capacity` suffices, fills `out` with the lengths and returns `Ok`;
 * otherwise returns `BufferTooSmall` (call once with `out = NULL` to size
 * the buffer). A word of n letters has at most n blocks.
 *
 * # Safety
 * `word` must be NUL-terminated. `out`, when non-NULL, must point to at
 * least `capacity` writable `uint32_t`s. `written` must be a valid pointer.
 */
enum ZbStatus zb_word_blocks(const char *word, uint32_t *out, size_t capacity, size_t *written);

/**
 * Builds the identity certificate for the given block lengths (each ≥ 2)
 * and stores a handle in `*out`. Release it with `zb_certificate_free`.
 *
 * # Safety
 * `blocks` must point to `len` readable `uint32_t`s and `out` must be a
 * valid pointer.
 */
enum ZbStatus zb_certificate_build(const uint32_t *blocks, size_t len, struct ZbCertificate **out);

/**
 * Evaluates both sides of the certificate's identity and records the
 * residual, the rigorous error bound, and the pass verdict in place.
 *
 * Pass 0 for `precision_bits`, `series_terms`, or `oracle_cutoff` to use
 * the built-in defaults, and NULL for `tolerance` to use `1e-10`
 * (otherwise a decimal or scientific-notation string like `"2.5e-12"`).
 * Returns `Ok` whether or not the verdict passes; read the verdict with
 * `zb_certificate_passed`.
 *
 * # Safety
 * `cert` must be a handle from `zb_certificate_build` that has not been
 * freed. `tolerance` must be NULL or NUL-terminated.
 */
enum ZbStatus zb_certificate_verify(struct ZbCertificate *cert,
                                    uint32_t precision_bits,
                                    uint32_t series_terms,
                                    uint64_t oracle_cutoff,
                                    const char *tolerance);

/**
 * Reads the verdict of a verified certificate into `*out`.
 *
 * # Safety
 * `cert` must be a live handle and `out` a valid pointer.
 */
enum ZbStatus zb_certificate_passed(const struct ZbCertificate *cert, bool *out);

/**
 * Serializes the certificate (and its numeric record, if verified) as a
 * JSON document. The returned string must be released with
 * `zb_string_free`.
 *
 * # Safety
 * `cert` must be a live handle and `out` a valid pointer.
 */
enum ZbStatus zb_certificate_json(const struct ZbCertificate *cert, char **out);

/**
 * Releases a certificate handle. NULL is a no-op.
 *
 * # Safety
 * `cert` must be NULL or a handle from `zb_certificate_build` that has not
 * already been freed.
 */
void zb_certificate_free(struct ZbCertificate *cert);

/**
 * Releases a string returned by this library. NULL is a no-op.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library that has not
 * already been freed.
 */
void zb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZETA_BLOCKS_H */

#ifndef SSAFSIM_H
#define SSAFSIM_H

/* Generated by cbindgen from ssafsim-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of an FFI call.
 */
typedef enum {
  SSAFSIM_STATUS_OK = 0,
  /**
   * A parameter violates a documented precondition.
   */
  SSAFSIM_STATUS_INVALID_ARGUMENT = 1,
  /**
   * An exhaustive-enumeration cap was exceeded.
   */
  SSAFSIM_STATUS_CAP_EXCEEDED = 2,
  /**
   * A required pointer was NULL.
   */
  SSAFSIM_STATUS_NULL_POINTER = 3,
} SsafsimStatus;

/**
 * Precoding strategy selector.
 */
typedef enum {
  SSAFSIM_STRATEGY_NONE = 0,
  SSAFSIM_STRATEGY_SINGLE = 1,
  SSAFSIM_STRATEGY_MULTI = 2,
} SsafsimStrategy;

/**
 * Opaque binary linear code.
 */
typedef struct SsafsimCode SsafsimCode;

/**
 * Opaque nested block-fading channel.
 */
typedef struct SsafsimMatryoshka SsafsimMatryoshka;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ssafsim_version(void);

/**
 * Build a nested channel from `num_blocks` diversity orders and block
 * lengths. On success writes a handle to `out`; free it with
 * `ssafsim_matryoshka_free`.
 *
 * # Safety
 * `diversities` and `lengths` must point to `num_blocks` readable
 * elements; `out` must be a valid pointer.
 */
SsafsimStatus ssafsim_matryoshka_new(const uint32_t *diversities,
                                     const uint64_t *lengths,
                                     uintptr_t num_blocks,
                                     SsafsimMatryoshka **out);

/**
 * Equivalent channel of a (beta, alpha, s, strategy) configuration for an
 * `n`-bit codeword, with equal per-slot spectral efficiencies.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
SsafsimStatus ssafsim_build_matryoshka(uint32_t beta,
                                       uint32_t alpha,
                                       uint32_t s,
                                       SsafsimStrategy strategy,
                                       uint64_t n,
                                       SsafsimMatryoshka **out);

/**
 * # Safety
 * `ch` must be a live handle from this library, or NULL.
 */
void ssafsim_matryoshka_free(SsafsimMatryoshka *ch);

/**
 * Number of blocks, or 0 for NULL.
 *
 * # Safety
 * `ch` must be a live handle or NULL.
 */
uintptr_t ssafsim_matryoshka_num_blocks(const SsafsimMatryoshka *ch);

/**
 * Copy the per-block diversities and lengths into caller arrays of
 * `ssafsim_matryoshka_num_blocks` elements.
 *
 * # Safety
 * `ch` must be a live handle; both output arrays must have room for
 * `ssafsim_matryoshka_num_blocks(ch)` elements.
 */
SsafsimStatus ssafsim_matryoshka_get(const SsafsimMatryoshka *ch,
                                     uint32_t *diversities,
                                     uint64_t *lengths);

/**
 * Generic diversity bound of a rate `rc_num/rc_den` code over `ch`.
 *
 * # Safety
 * `ch` must be a live handle; `out` must be valid.
 */
SsafsimStatus ssafsim_delta_max_generic(const SsafsimMatryoshka *ch,
                                        int64_t rc_num,
                                        int64_t rc_den,
                                        uint32_t *out);

/**
 * Closed-form bound `min(s + floor((beta+1+alpha)(1-Rc)), beta+1)`.
 *
 * # Safety
 * `out` must be valid.
 */
SsafsimStatus ssafsim_delta_closed_form(uint32_t beta,
                                        uint32_t alpha,
                                        uint32_t s,
                                        int64_t rc_num,
                                        int64_t rc_den,
                                        uint32_t *out);

/**
 * Multi-precoder bound (requires `s` dividing `beta + 1`).
 *
 * # Safety
 * `out` must be valid.
 */
SsafsimStatus ssafsim_delta_multi_precoder(uint32_t beta,
                                           uint32_t s,
                                           int64_t rc_num,
                                           int64_t rc_den,
                                           uint32_t *out);

/**
 * Unequal-spectral-efficiency bound for `beta + 1` slot bit loads `m`.
 *
 * # Safety
 * `m` must point to `m_len` readable elements; `out` must be valid.
 */
SsafsimStatus ssafsim_delta_unequal_m(uint32_t beta,
                                      uint32_t s,
                                      const uint32_t *m,
                                      uintptr_t m_len,
                                      int64_t rc_num,
                                      int64_t rc_den,
                                      uint32_t *out);

/**
 * Largest full-diversity coding rate `(s + alpha)/(beta + 1 + alpha)`,
 * capped at 1, returned as an exact fraction.
 *
 * # Safety
 * `out_num` and `out_den` must be valid.
 */
SsafsimStatus ssafsim_max_full_diversity_rate(uint32_t beta,
                                              uint32_t alpha,
                                              uint32_t s,
                                              int64_t *out_num,
                                              int64_t *out_den);

/**
 * Build a systematic code `[I | P]` from the row-major `k x (n - k)`
 * parity bit matrix (entries 0/1). Free with `ssafsim_code_free`.
 *
 * # Safety
 * `parity` must point to `k * (n - k)` readable bytes; `out` must be
 * valid.
 */
SsafsimStatus ssafsim_code_new_systematic(const uint8_t *parity,
                                          uintptr_t k,
                                          uintptr_t n,
                                          SsafsimCode **out);

/**
 * # Safety
 * `code` must be a live handle from this library, or NULL.
 */
void ssafsim_code_free(SsafsimCode *code);

/**
 * Exact code diversity on a nested channel by exhaustive codeword
 * enumeration (dimension capped at 20).
 *
 * # Safety
 * `code` and `ch` must be live handles; `out` must be valid.
 */
SsafsimStatus ssafsim_code_diversity_oracle(const SsafsimCode *code,
                                            const SsafsimMatryoshka *ch,
                                            uint32_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SSAFSIM_H */

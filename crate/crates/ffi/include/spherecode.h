#ifndef SPHERECODE_H
#define SPHERECODE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_POINTER = 1,
  SC_STATUS_INVALID_ARGUMENT = 2,
  SC_STATUS_EMPTY_CODE = 3,
  SC_STATUS_BUDGET_EXCEEDED = 4,
  SC_STATUS_PARSE = 5,
  SC_STATUS_IO = 6,
  SC_STATUS_BUFFER_TOO_SMALL = 7,
  SC_STATUS_PANIC = 8,
} ScStatus;

/**
 * Soft demapping methods.
 */
typedef enum ScDemapper {
  SC_DEMAPPER_EXACT = 0,
  SC_DEMAPPER_SYMBOL_BY_SYMBOL = 1,
  SC_DEMAPPER_ORBIT_FROZEN = 2,
  SC_DEMAPPER_BCJR = 3,
} ScDemapper;

/**
 * Opaque shell or permutation code.
 */
typedef struct ScCode ScCode;

/**
 * Opaque LDPC parity-check matrix.
 */
typedef struct ScLdpc ScLdpc;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message, NUL-terminated and
 * truncated to `len` bytes. Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t sc_last_error(char *buf, size_t len);

/**
 * Builds the maximal `k`-class partial `(n, energy, p)` shell code, or the
 * complete shell when `k` is 0.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ScStatus sc_code_new_shell(size_t n, uint64_t energy, size_t p, size_t k, struct ScCode **out);

/**
 * Builds a named preset such as `"n12code2"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ScStatus sc_code_new_preset(const char *name, struct ScCode **out);

/**
 * # Safety
 * `code` must be null or a handle from `sc_code_new_*` not yet freed.
 */
void sc_code_free(struct ScCode *code);

/**
 * Block length, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t sc_code_length(const struct ScCode *code);

/**
 * `log2` of the number of unsigned codewords.
 *
 * # Safety
 * `code` must be a live handle and `out` a valid pointer.
 */
enum ScStatus sc_code_size_log2(const struct ScCode *code, double *out);

/**
 * Writes the amplitudes of the codeword with decimal index `index` into
 * `amplitudes[0..len]`; `len` must equal the block length.
 *
 * # Safety
 * `index` must be a NUL-terminated string and `amplitudes` point to `len`
 * writable values.
 */
enum ScStatus sc_code_encode(const struct ScCode *code,
                             const char *index,
                             uint32_t *amplitudes,
                             size_t len);

/**
 * Writes the decimal index of a codeword into `buf` (NUL-terminated).
 *
 * # Safety
 * `amplitudes` must point to `len` values and `buf` to `buf_len` bytes.
 */
enum ScStatus sc_code_decode(const struct ScCode *code,
                             const uint32_t *amplitudes,
                             size_t len,
                             char *buf,
                             size_t buf_len);

/**
 * Label-bit LLRs of one received word. `llr` receives `n · bits_per_symbol`
 * values, per symbol the sign bit first; positive favours bit 0.
 *
 * # Safety
 * `y` must point to `n` values and `llr` to `llr_len` writable values.
 */
enum ScStatus sc_llr(const struct ScCode *code,
                     enum ScDemapper method,
                     const double *y,
                     size_t n,
                     double sigma,
                     double *llr,
                     size_t llr_len);

/**
 * Loads a parity-check matrix in alist format.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ScStatus sc_ldpc_load(const char *path, struct ScLdpc **out);

/**
 * # Safety
 * `h` must be null or a handle from `sc_ldpc_load` not yet freed.
 */
void sc_ldpc_free(struct ScLdpc *h);

/**
 * Code length, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t sc_ldpc_length(const struct ScLdpc *h);

/**
 * Sum-product decoding. `bits` receives `n` hard decisions (0 or 1);
 * `converged` is set to 1 when the syndrome is satisfied.
 *
 * # Safety
 * `llr` must point to `n` values, `bits` to `n` writable bytes and
 * `converged` be valid.
 */
enum ScStatus sc_ldpc_decode(const struct ScLdpc *h,
                             const double *llr,
                             size_t n,
                             size_t max_iter,
                             uint8_t *bits,
                             int32_t *converged);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPHERECODE_H */

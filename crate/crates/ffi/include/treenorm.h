#ifndef TREENORM_H
#define TREENORM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum TnStatus {
  TN_STATUS_OK = 0,
  TN_STATUS_NULL_ARGUMENT = 1,
  TN_STATUS_UTF8 = 2,
  TN_STATUS_PARSE = 3,
  TN_STATUS_INVALID_INPUT = 4,
  TN_STATUS_PRECONDITION = 5,
  TN_STATUS_UNSUPPORTED = 6,
  TN_STATUS_LIMIT_EXCEEDED = 7,
  TN_STATUS_CERTIFICATE = 8,
  TN_STATUS_PANIC = 9,
} TnStatus;

/**
 * Linear combination of segment functionals, validated for one space.
 */
typedef struct TnFunctional TnFunctional;

/**
 * Finitely supported vector on tree nodes.
 */
typedef struct TnVector TnVector;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `{"space"?, "entries": [{"node", "value"}]}` into a new vector.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum TnStatus tn_vector_from_json(const char *json, struct TnVector **out);

/**
 * # Safety
 * `v` must come from [`tn_vector_from_json`] and not be used afterwards.
 */
void tn_vector_free(struct TnVector *v);

/**
 * Number of nonzero coordinates, 0 for a null handle.
 *
 * # Safety
 * `v` must be null or a live handle.
 */
size_t tn_vector_len(const struct TnVector *v);

/**
 * Norm report `{"value", "witness", ...}`. A null `space` uses the one
 * embedded in the vector.
 *
 * # Safety
 * `v` must be a live handle, `space` null or a nul-terminated string,
 * `out_json` writable.
 */
enum TnStatus tn_vector_norm(const struct TnVector *v, const char *space, char **out_json);

/**
 * Parses `{"class"?, "terms": [{"coeff", "top", "bottom"}]}` for `space`.
 *
 * # Safety
 * `json` and `space` must be nul-terminated strings; `out` writable.
 */
enum TnStatus tn_functional_from_json(const char *json,
                                      const char *space,
                                      struct TnFunctional **out);

/**
 * # Safety
 * `g` must come from [`tn_functional_from_json`] and not be used afterwards.
 */
void tn_functional_free(struct TnFunctional *g);

/**
 * Certified dual norm report `{"lower", "upper", ...}`; `level_cap < 0`
 * uses the deepest level of the functional.
 *
 * # Safety
 * `g` must be a live handle and `out_json` writable.
 */
enum TnStatus tn_dual_norm(const struct TnFunctional *g, int64_t level_cap, char **out_json);

/**
 * Diameter report for the norming-set slice at `v` with rational `alpha`.
 *
 * # Safety
 * `v` must be a live handle, `space` null or a nul-terminated string,
 * `alpha` a nul-terminated string, `out_json` writable.
 */
enum TnStatus tn_slice_diameter(const struct TnVector *v,
                                const char *space,
                                const char *alpha,
                                char **out_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void tn_string_free(char *s);

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *tn_last_error(void);

/**
 * Static version string.
 */
const char *tn_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TREENORM_H */

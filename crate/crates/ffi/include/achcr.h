#ifndef ACHCR_H
#define ACHCR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the nonzero values below 6 match the `achcr` exit codes.
 */
typedef enum AchcrStatus {
  ACHCR_STATUS_OK = 0,
  /**
   * The algebra failed validation, or an input was rejected structurally.
   */
  ACHCR_STATUS_INVALID = 2,
  /**
   * A solver assertion or an identity check failed.
   */
  ACHCR_STATUS_SOLVER = 3,
  ACHCR_STATUS_PARSE = 4,
  ACHCR_STATUS_BAD_PARAMETER = 5,
  ACHCR_STATUS_NULL_POINTER = 6,
  /**
   * A string argument was not valid UTF-8.
   */
  ACHCR_STATUS_UTF8 = 7,
} AchcrStatus;

/**
 * A structure algebra loaded from a built-in name or a JSON document.
 */
typedef struct AchcrAlgebra AchcrAlgebra;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *achcr_last_error(void);

/**
 * Loads `builtin:<name>` or a document path.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AchcrStatus achcr_algebra_load(const char *source, struct AchcrAlgebra **out);

/**
 * Parses an algebra document held in memory.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AchcrStatus achcr_algebra_from_json(const char *json, struct AchcrAlgebra **out);

/**
 * # Safety
 * `alg` must come from a load call and not be used afterwards; NULL is ignored.
 */
void achcr_algebra_free(struct AchcrAlgebra *alg);

/**
 * CR dimension `n`, or 0 for a NULL handle.
 *
 * # Safety
 * `alg` must be NULL or a live handle.
 */
size_t achcr_algebra_dimension(const struct AchcrAlgebra *alg);

/**
 * Writes the validation report. Returns `Invalid` if a check fails.
 *
 * # Safety
 * `alg` must be a live handle and `report` a valid pointer.
 */
enum AchcrStatus achcr_validate(const struct AchcrAlgebra *alg, char **report);

/**
 * Runs the construction; `truncation` 0 selects the minimal one.
 *
 * # Safety
 * `alg` must be a live handle and `report` a valid pointer.
 */
enum AchcrStatus achcr_solve(const struct AchcrAlgebra *alg, size_t truncation, char **report);

/**
 * Runs the comma-separated `checks` (or `all`); `lambda` is a rational
 * string used by the scaling check.
 *
 * # Safety
 * `alg` must be a live handle, the strings NUL-terminated and `report` valid.
 */
enum AchcrStatus achcr_verify(const struct AchcrAlgebra *alg,
                              const char *checks,
                              const char *lambda,
                              char **report);

/**
 * The leading first-variation coefficient `a_{n+1}` at the sphere as `"p/q"`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AchcrStatus achcr_sphere_coefficient(size_t n, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards; NULL is ignored.
 */
void achcr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACHCR_H */

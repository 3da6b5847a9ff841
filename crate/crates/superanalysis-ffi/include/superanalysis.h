#ifndef SUPERANALYSIS_H
#define SUPERANALYSIS_H

/* Generated by cbindgen from crates/superanalysis-ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum {
  SA_STATUS_OK = 0,
  SA_STATUS_NULL_POINTER = 1,
  SA_STATUS_INVALID_ARGUMENT = 2,
  SA_STATUS_DOMAIN = 3,
  SA_STATUS_NOT_INVERTIBLE = 4,
  SA_STATUS_SHAPE_MISMATCH = 5,
  SA_STATUS_PARSE = 6,
  SA_STATUS_NUMERICAL = 7,
  SA_STATUS_PANIC = 8,
} SaStatus;

/**
 * An element of a finite Grassmann algebra Λ_L.
 */
typedef struct SaSupernumber SaSupernumber;

/**
 * Length in bytes of the last error message on this thread, excluding the terminator; 0 if none.
 */
size_t sa_last_error_length(void);

/**
 * Copy the last error message into `buf` (always NUL-terminated when `len > 0`, truncated if
 * needed). Returns the number of bytes written, excluding the terminator.
 *
 * # Safety
 * `buf` must be valid for `len` bytes of writes, or null with `len == 0`.
 */
size_t sa_last_error_message(char *buf, size_t len);

/**
 * The zero element of Λ_L.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
SaStatus sa_supernumber_new(uint32_t l, SaSupernumber **out);

/**
 * Parse the JSON form `{"L": .., "terms": [{"mask", "re", "im"}, ..]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for one pointer write.
 */
SaStatus sa_supernumber_from_json(const char *json, SaSupernumber **out);

/**
 * JSON form of `x`, to be released with [`sa_string_free`]. Null on failure.
 *
 * # Safety
 * `x` must be a live handle.
 */
char *sa_supernumber_to_json(const SaSupernumber *x);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void sa_string_free(char *s);

/**
 * # Safety
 * `x` must be null or a live handle; it is invalid afterwards.
 */
void sa_supernumber_free(SaSupernumber *x);

/**
 * Number of generators L of the algebra `x` lives in.
 *
 * # Safety
 * `x` must be a live handle; `out` valid for one write.
 */
SaStatus sa_supernumber_generators(const SaSupernumber *x, uint32_t *out);

/**
 * Add `re + i·im` to the coefficient of the monomial `mask` (bit j−1 is generator j).
 *
 * # Safety
 * `x` must be a live handle.
 */
SaStatus sa_supernumber_add_term(SaSupernumber *x, uint32_t mask, double re, double im);

/**
 * # Safety
 * `x` must be a live handle; `re`, `im` valid for one write each.
 */
SaStatus sa_supernumber_coeff(const SaSupernumber *x, uint32_t mask, double *re, double *im);

/**
 * `a + b`; operands in different algebras are embedded in the larger one.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` valid for one pointer write.
 */
SaStatus sa_supernumber_add(const SaSupernumber *a, const SaSupernumber *b, SaSupernumber **out);

/**
 * `a − b`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` valid for one pointer write.
 */
SaStatus sa_supernumber_sub(const SaSupernumber *a, const SaSupernumber *b, SaSupernumber **out);

/**
 * `a · b` in the Grassmann product.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` valid for one pointer write.
 */
SaStatus sa_supernumber_mul(const SaSupernumber *a, const SaSupernumber *b, SaSupernumber **out);

/**
 * `x⁻¹`; fails with [`SaStatus::NotInvertible`] when the body vanishes.
 *
 * # Safety
 * `x` must be a live handle; `out` valid for one pointer write.
 */
SaStatus sa_supernumber_inverse(const SaSupernumber *x, SaSupernumber **out);

/**
 * # Safety
 * `x` must be a live handle; `out` valid for one pointer write.
 */
SaStatus sa_supernumber_exp(const SaSupernumber *x, SaSupernumber **out);

/**
 * Berezin integral over the generators in `mask`.
 *
 * # Safety
 * `x` must be a live handle; `out` valid for one pointer write.
 */
SaStatus sa_supernumber_berezin(const SaSupernumber *x, uint32_t mask, SaSupernumber **out);

/**
 * Exact averaged GUE eigenvalue density at `lambda` for an N×N matrix with scale J.
 *
 * # Safety
 * `out` must be valid for one write.
 */
SaStatus sa_gue_density(size_t n, double j, double lambda, double *out);

/**
 * Heat-kernel supertrace of the d-dimensional SUSY oscillator; equals 1.
 *
 * # Safety
 * `omegas` must point to `d` doubles; `re`, `im` valid for one write each.
 */
SaStatus sa_witten_supertrace(const double *omegas, size_t d, double t, double *re, double *im);

/**
 * Number of acceptance criteria.
 */
size_t sa_selftest_count(void);

/**
 * Run acceptance criterion `id` (1-based) and store whether it passed.
 *
 * # Safety
 * `passed` must be valid for one write.
 */
SaStatus sa_selftest_run(size_t id, bool *passed);

#endif  /* SUPERANALYSIS_H */

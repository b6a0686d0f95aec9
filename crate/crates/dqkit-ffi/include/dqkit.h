#ifndef DQKIT_H
#define DQKIT_H

/* Generated by cbindgen from crates/dqkit-ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define DQ_OK 0

#define DQ_ERR_NULL -1

#define DQ_ERR_UTF8 -2

#define DQ_ERR_PARSE -3

#define DQ_ERR_INVALID_ARGUMENT -4

#define DQ_ERR_COMPUTE -5

#define DQ_ERR_BUFFER_TOO_SMALL -6

#define DQ_ERR_PANIC -99

/**
 * Truncated Hermite basis with fixed `hbar`.
 */
typedef struct DqBasis DqBasis;

/**
 * Polynomial in `q, p` with exact complex rational coefficients.
 */
typedef struct DqPoly DqPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static version string.
 */
const char *dq_version(void);

/**
 * Copy the calling thread's last error message. Returns its length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t dq_last_error(char *buf, size_t len);

/**
 * Parse a polynomial such as `q^2*p - 3/2 + i*p`.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
int32_t dq_poly_parse(const char *src, struct DqPoly **out);

/**
 * # Safety
 * `p` must come from `dq_poly_parse` and not be freed twice. Null is ignored.
 */
void dq_poly_free(struct DqPoly *p);

/**
 * Canonical text of a polynomial.
 *
 * # Safety
 * `p` must be a live handle; `buf` must hold `len` bytes; `needed` may be null.
 */
int32_t dq_poly_to_string(const struct DqPoly *p, char *buf, size_t len, size_t *needed);

/**
 * Full Moyal star product `f * g` as an hbar polynomial.
 *
 * # Safety
 * As for `dq_poly_to_string`.
 */
int32_t dq_poly_star(const struct DqPoly *f,
                     const struct DqPoly *g,
                     char *buf,
                     size_t len,
                     size_t *needed);

/**
 * Moyal bracket `(f*g - g*f) / (-i hbar)`.
 *
 * # Safety
 * As for `dq_poly_to_string`.
 */
int32_t dq_poly_moyal_bracket(const struct DqPoly *f,
                              const struct DqPoly *g,
                              char *buf,
                              size_t len,
                              size_t *needed);

/**
 * # Safety
 * `out` must be writable.
 */
int32_t dq_basis_new(size_t size, double hbar, struct DqBasis **out);

/**
 * # Safety
 * `b` must come from `dq_basis_new` and not be freed twice. Null is ignored.
 */
void dq_basis_free(struct DqBasis *b);

/**
 * Relative distance between the symbolic star product and the operator product of Weyl images,
 * on a `points x points` grid inside the resolved disc.
 *
 * # Safety
 * Handles must be live; `residual` must be writable.
 */
int32_t dq_cross_validate_star(const struct DqBasis *b,
                               const struct DqPoly *f,
                               const struct DqPoly *g,
                               size_t points,
                               double *residual);

/**
 * Wigner function of basis state `n` on `[-w, w]^2` with `points` per axis.
 * `values` receives `points * points` reals, q-major with p fastest.
 *
 * # Safety
 * `b` must be live; `values` must hold `len` doubles.
 */
int32_t dq_wigner(const struct DqBasis *b,
                  size_t n,
                  double half_width,
                  size_t points,
                  double *values,
                  size_t len);

/**
 * Normal form of a word in `a, b, c, d` under the SL_q(2) relations, e.g. `d*a`.
 *
 * # Safety
 * `word` must be NUL-terminated; buffer rules as for `dq_poly_to_string`.
 */
int32_t dq_normalize(const char *word, char *buf, size_t len, size_t *needed);

/**
 * Evaluate a CLI expression. `config_json` may be null.
 *
 * # Safety
 * Strings must be NUL-terminated; buffer rules as for `dq_poly_to_string`.
 */
int32_t dq_eval(const char *expr, const char *config_json, char *buf, size_t len, size_t *needed);

/**
 * Run a verification suite and return its JSON report. `passed` is set to 1 when
 * every check passed and 0 otherwise; check failures are not an error status.
 *
 * # Safety
 * Strings must be NUL-terminated; `passed` may be null; buffer rules as for `dq_poly_to_string`.
 */
int32_t dq_verify(const char *suite,
                  const char *config_json,
                  int32_t *passed,
                  char *buf,
                  size_t len,
                  size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DQKIT_H */

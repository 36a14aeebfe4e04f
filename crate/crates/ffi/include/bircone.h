#ifndef BIRCONE_H
#define BIRCONE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BirconeLocus {
  BIRCONE_LOCUS_EMPTY = 0,
  BIRCONE_LOCUS_YZ_ZERO = 1,
  BIRCONE_LOCUS_WX_ZERO = 2,
} BirconeLocus;

typedef enum BirconeStatus {
  BIRCONE_STATUS_OK = 0,
  BIRCONE_STATUS_NULL_POINTER = 1,
  BIRCONE_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed or invariant-violating input.
   */
  BIRCONE_STATUS_INVALID_INPUT = 3,
  /**
   * A well-formed request the mathematics rejects (e.g. a non-flopping wall).
   */
  BIRCONE_STATUS_DOMAIN = 4,
  BIRCONE_STATUS_PANIC = 5,
} BirconeStatus;

/**
 * Opaque chart handle.
 */
typedef struct BirconeChart BirconeChart;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next call into this library on the thread.
 */
const char *bircone_last_error(void);

/**
 * Parses and validates a chart descriptor.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum BirconeStatus bircone_chart_from_json(const char *json, struct BirconeChart **out);

/**
 * # Safety
 * `chart` must be null or a handle from this library not yet freed.
 */
void bircone_chart_free(struct BirconeChart *chart);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void bircone_string_free(char *s);

/**
 * # Safety
 * `chart` must be a live handle and `out` writable.
 */
enum BirconeStatus bircone_chart_rank(const struct BirconeChart *chart, size_t *out);

/**
 * Serializes the chart as a descriptor document.
 *
 * # Safety
 * `chart` must be a live handle and `out` writable.
 */
enum BirconeStatus bircone_chart_to_json(const struct BirconeChart *chart, char **out);

/**
 * Flops `chart` across wall `wall` into a new handle.
 *
 * # Safety
 * `chart` must be a live handle and `out` writable.
 */
enum BirconeStatus bircone_chart_flop(const struct BirconeChart *chart,
                                      size_t wall,
                                      struct BirconeChart **out);

/**
 * `F(A, B, C)` for classes of length `len`.
 *
 * # Safety
 * `a`, `b`, `c` must point to `len` readable values and `out` be writable.
 */
enum BirconeStatus bircone_cubic_eval(const struct BirconeChart *chart,
                                      const int64_t *a,
                                      const int64_t *b,
                                      const int64_t *c,
                                      size_t len,
                                      int64_t *out);

/**
 * Reflects `h` across divisorial wall `wall`; writes `len` values to `out`.
 *
 * # Safety
 * `h` must point to `len` readable values and `out` to `len` writable ones.
 */
enum BirconeStatus bircone_reflect_divisorial(const struct BirconeChart *chart,
                                              size_t wall,
                                              const int64_t *h,
                                              size_t len,
                                              int64_t *out);

/**
 * Runs the flop lemma check at the default samples; writes the JSON report
 * to `report` and the symbolic verdict to `verdict`.
 *
 * # Safety
 * `a`, `b`, `c` must point to `len` readable values; `report` and
 * `verdict` must be writable.
 */
enum BirconeStatus bircone_verify_flop_lemma(const struct BirconeChart *chart,
                                             size_t wall,
                                             const int64_t *a,
                                             const int64_t *b,
                                             const int64_t *c,
                                             size_t len,
                                             bool *verdict,
                                             char **report);

/**
 * Moment map at `(w, x, y, z)` given as 8 doubles `re, im` per coordinate.
 *
 * # Safety
 * `coords` must point to 8 readable doubles and `out` be writable.
 */
enum BirconeStatus bircone_moment_map(const double *coords, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum BirconeStatus bircone_unstable_locus(double r, enum BirconeLocus *out);

/**
 * Area of the exceptional curve at level `r` with an `n`-point grid.
 *
 * # Safety
 * `out` must be writable.
 */
enum BirconeStatus bircone_exceptional_area(double r, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIRCONE_H */

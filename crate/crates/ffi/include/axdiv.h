#ifndef AXDIV_H
#define AXDIV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AxdivStatus {
  AXDIV_STATUS_OK = 0,
  AXDIV_STATUS_NULL_POINTER = 1,
  AXDIV_STATUS_INVALID_UTF8 = 2,
  AXDIV_STATUS_INVALID_INPUT = 3,
  AXDIV_STATUS_INVALID_ARGUMENT = 4,
  AXDIV_STATUS_GUARD_EXCEEDED = 5,
  AXDIV_STATUS_MATH_FAILURE = 6,
  AXDIV_STATUS_PANIC = 7,
} AxdivStatus;

// Opaque handle to a parsed variety description.
typedef struct AxdivVariety AxdivVariety;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a JSON description into a new handle stored in `*out`.
//
// # Safety
// `json` must be a nul-terminated string and `out` a valid pointer.
enum AxdivStatus axdiv_variety_from_json(const char *json, struct AxdivVariety **out);

// Releases a handle; null is ignored.
//
// # Safety
// `v` must come from [`axdiv_variety_from_json`] and not be freed twice.
void axdiv_variety_free(struct AxdivVariety *v);

// Number of variables and of polynomials.
//
// # Safety
// Pointers must be valid.
enum AxdivStatus axdiv_variety_shape(const struct AxdivVariety *v, size_t *n, size_t *r);

// The Adolphson–Sperber exponent `μ`.
//
// # Safety
// Pointers must be valid.
enum AxdivStatus axdiv_mu(const struct AxdivVariety *v, int64_t *out);

// `|V(F_{p^a})|` by exhaustive evaluation.
//
// # Safety
// Pointers must be valid.
enum AxdivStatus axdiv_count_points(const struct AxdivVariety *v,
                                    uint64_t p,
                                    uint32_t a,
                                    uint64_t *out);

// The Hasse polynomial evaluated at the coefficients, modulo `p`.
//
// # Safety
// Pointers must be valid.
enum AxdivStatus axdiv_hasse_value(const struct AxdivVariety *v,
                                   uint64_t p,
                                   uint32_t a,
                                   uint64_t *out);

// Bound report as a JSON string; `p = 0` omits the prime-dependent bound.
//
// # Safety
// Pointers must be valid; the string is released with [`axdiv_string_free`].
enum AxdivStatus axdiv_bounds_json(const struct AxdivVariety *v,
                                   uint64_t p,
                                   uint32_t a,
                                   char **out);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void axdiv_string_free(char *s);

// Message of the last failure on this thread, or null. Valid until the next
// call into the library on the same thread.
const char *axdiv_last_error(void);

// Static version string.
const char *axdiv_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AXDIV_H */

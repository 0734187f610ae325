#ifndef MRD_H
#define MRD_H

/* Generated by cbindgen from the mrd-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum MrdStatus {
  // The call succeeded.
  MRD_STATUS_OK = 0,
  // A required pointer argument was NULL.
  MRD_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  MRD_STATUS_INVALID_UTF8 = 2,
  // An expression failed to parse; the message carries the byte position.
  MRD_STATUS_SYNTAX = 3,
  // The inputs parse but the mathematics rejects them (wrong valuation,
  // insufficient truncation, non-invertible series, mismatched specs).
  MRD_STATUS_DOMAIN = 4,
  // An index lies outside the computed truncation.
  MRD_STATUS_OUT_OF_RANGE = 5,
} MrdStatus;

// Opaque array spec: either a classical pair or a multiple spec with
// `ell >= 2` multipliers.
typedef struct MrdSpec MrdSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy of the most recent error message on this thread, or NULL if no
// failure has happened yet. Release with `mrd_string_free`.
//
// # Safety
// Always safe to call; the returned pointer is either NULL or a fresh
// NUL-terminated allocation owned by the caller.
char *mrd_last_error_message(void);

// Release a string produced by this library.
//
// # Safety
// `text` must be NULL or a pointer previously returned by one of the
// `mrd_*` functions, and must not be used afterwards.
void mrd_string_free(char *text);

// Build a spec from generating-function expressions.
//
// `f` points at `f_count` expression strings. One multiplier builds a
// classical spec; two or more build a multiple spec with `ell = f_count`.
// A nonzero `square` selects the square ("type") layout, where multipliers
// keep a nonzero constant term. Every series is truncated at `order`.
//
// # Safety
// `g` and each of the `f_count` entries of `f` must be NUL-terminated
// strings, and `out` must be a valid pointer. On success `*out` owns the
// handle; release it with `mrd_spec_free`.
enum MrdStatus mrd_spec_new(const char *g,
                            const char *const *f,
                            size_t f_count,
                            int square,
                            size_t order,
                            struct MrdSpec **out);

// Release a spec handle.
//
// # Safety
// `spec` must be NULL or a pointer from a spec-producing call, and must
// not be used afterwards.
void mrd_spec_free(struct MrdSpec *spec);

// Number of multipliers (1 for classical specs); 0 if `spec` is NULL.
//
// # Safety
// `spec` must be NULL or a live spec handle.
size_t mrd_spec_ell(const struct MrdSpec *spec);

// Entry `(n, k)` of the array as a `"p/q"` string.
//
// # Safety
// `spec` must be a live spec handle and `out` a valid pointer; on success
// the caller owns `*out` and releases it with `mrd_string_free`.
enum MrdStatus mrd_spec_entry(const struct MrdSpec *spec, size_t n, size_t k, char **out);

// The leading `rows x cols` block in CSV form, one text row per line,
// cells as `"p/q"`.
//
// # Safety
// Same contract as `mrd_spec_entry`.
enum MrdStatus mrd_spec_build_csv(const struct MrdSpec *spec, size_t rows, size_t cols, char **out);

// Group product of two specs of the same shape.
//
// # Safety
// `a` and `b` must be live spec handles and `out` a valid pointer; on
// success the caller owns `*out`.
enum MrdStatus mrd_spec_mul(const struct MrdSpec *a, const struct MrdSpec *b, struct MrdSpec **out);

// Group inverse of a proper spec.
//
// # Safety
// Same contract as `mrd_spec_mul`.
enum MrdStatus mrd_spec_inverse(const struct MrdSpec *spec, struct MrdSpec **out);

// A- and Z-sequence characterization as a JSON object
// `{"ell", "stride", "A", "Z"}` with `terms` strided entries per sequence.
//
// # Safety
// Same contract as `mrd_spec_entry`.
enum MrdStatus mrd_spec_seq_json(const struct MrdSpec *spec, size_t terms, char **out);

// Minor-positivity report for the leading `rows x rows` block, as the
// same JSON object the CLI prints: `{"order", "block", "ok", "witness"}`
// plus `"budget"` when the enumeration was refused. Pass `budget = 0` for
// the default limit.
//
// # Safety
// Same contract as `mrd_spec_entry`.
enum MrdStatus mrd_spec_tp_json(const struct MrdSpec *spec,
                                size_t rows,
                                size_t max_order,
                                uint64_t budget,
                                char **out);

// Evaluate a generating-function expression to `order` and return the
// coefficients as one CSV line of `"p/q"` cells.
//
// # Safety
// `expr` must be a NUL-terminated string and `out` a valid pointer; on
// success the caller owns `*out`.
enum MrdStatus mrd_eval_csv(const char *expr, size_t order, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MRD_H */

#ifndef OSCINT_H
#define OSCINT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum OscintStatus {
  OSCINT_STATUS_OK = 0,
  OSCINT_STATUS_NULL_POINTER = 1,
  // Malformed fewnomial or argument (lengths, exponents, zero or non-finite values).
  OSCINT_STATUS_INVALID_INPUT = 2,
  OSCINT_STATUS_PARSE = 3,
  OSCINT_STATUS_OVERFLOW = 4,
  OSCINT_STATUS_TOLERANCE_NOT_MET = 5,
  OSCINT_STATUS_INVALID_TOLERANCE = 6,
  // The zero phase where a nonzero one is needed.
  OSCINT_STATUS_DEGENERATE_PHASE = 7,
  // Internal failure; the library state is unaffected.
  OSCINT_STATUS_PANIC = 8,
} OscintStatus;

// Opaque fewnomial handle.
typedef struct OscintFewnomial OscintFewnomial;

// One multiplier value with its absolute error bound.
typedef struct OscintSample {
  double re;
  double im;
  double abs_err;
} OscintSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a successful one. The
// pointer stays valid until the next call on the same thread.
const char *oscint_last_error_message(void);

// Library version as a static nul-terminated string.
const char *oscint_version(void);

// Builds `Σ coeffs[j] t^{exponents[j]}` from `len` terms; `len = 0` gives the zero phase.
//
// # Safety
// `coeffs` and `exponents` must point to `len` readable values (or be null when `len` is 0)
// and `out` must be writable.
enum OscintStatus oscint_fewnomial_new(const double *coeffs,
                                       const uint32_t *exponents,
                                       size_t len,
                                       struct OscintFewnomial **out);

// Parses `{"coeffs": [...], "exponents": [...]}`.
//
// # Safety
// `json` must be a nul-terminated string and `out` writable.
enum OscintStatus oscint_fewnomial_from_json(const char *json, struct OscintFewnomial **out);

// Releases a handle; null is ignored.
//
// # Safety
// `q` must come from this library and not be used afterwards.
void oscint_fewnomial_free(struct OscintFewnomial *q);

// Number of terms.
//
// # Safety
// `q` must be a live handle and `out` writable.
enum OscintStatus oscint_fewnomial_len(const struct OscintFewnomial *q, size_t *out);

// `Q^{(order)}(t)`.
//
// # Safety
// `q` must be a live handle and `out` writable.
enum OscintStatus oscint_fewnomial_eval(const struct OscintFewnomial *q,
                                        double t,
                                        uint32_t order,
                                        double *out);

// JSON text of the fewnomial; release with [`oscint_string_free`].
//
// # Safety
// `q` must be a live handle and `out` writable.
enum OscintStatus oscint_fewnomial_to_json(const struct OscintFewnomial *q, char **out);

// The multiplier `m(ξ)` to absolute accuracy `tol`.
//
// # Safety
// `q` must be a live handle and `out` writable.
enum OscintStatus oscint_pv_multiplier(const struct OscintFewnomial *q,
                                       double xi,
                                       double tol,
                                       struct OscintSample *out);

// `sup |m|` over the automatic frequency grid with `per_octave` points per octave
// (0 selects the default); writes the sup and the frequency where it is attained.
//
// # Safety
// `q` must be a live handle; `sup` and `argmax_xi` writable.
enum OscintStatus oscint_multiplier_sup(const struct OscintFewnomial *q,
                                        uint32_t per_octave,
                                        double tol,
                                        double *sup,
                                        double *argmax_xi);

// Bad scale sets and good components at comparability exponent `gamma`, as JSON with keys
// `bad0`, `bad1`, `window`, `components`. Release with [`oscint_string_free`].
//
// # Safety
// `q` must be a live handle and `out` writable.
enum OscintStatus oscint_decompose_json(const struct OscintFewnomial *q,
                                        uint32_t gamma,
                                        char **out);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void oscint_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OSCINT_H */

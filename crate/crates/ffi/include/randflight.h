#ifndef RANDFLIGHT_H
#define RANDFLIGHT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Outcome of a call.
 */
typedef enum RfStatus {
  RF_STATUS_OK = 0,
  RF_STATUS_INVALID_ARGUMENT = 1,
  RF_STATUS_OUT_OF_SUPPORT = 2,
  RF_STATUS_DIVERGENT = 3,
  RF_STATUS_MISSING_TABLE = 4,
  RF_STATUS_TRUNCATION = 5,
  RF_STATUS_CACHE = 6,
  RF_STATUS_IO = 7,
  RF_STATUS_NULL_POINTER = 8,
  RF_STATUS_PANIC = 9,
} RfStatus;

/*
 Conditional Fourier tables for c = 1, 2, ...
 */
typedef struct RfTableSet RfTableSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error of this thread into `buf` (NUL-terminated, truncated
 to `len`). Returns the full message length, 0 when there is none.

 # Safety
 `buf` must be null or valid for `len` bytes.
 */
size_t rf_last_error_message(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *rf_version(void);

/*
 C(c, m) as a double.

 # Safety
 `out` must be valid for writing.
 */
enum RfStatus rf_c_coeff(uint32_t c, uint32_t m, double *out);

/*
 Number of collisions kept for rate-time product `lambda_t`.

 # Safety
 `out` must be valid for writing.
 */
enum RfStatus rf_c_max(double lambda_t, double epsilon, uint32_t *out);

/*
 Li2(x) for x <= 1.

 # Safety
 `out` must be valid for writing.
 */
enum RfStatus rf_dilog(double x, double *out);

/*
 Real part of Li2 on the whole real line.

 # Safety
 `out` must be valid for writing.
 */
enum RfStatus rf_re_dilog(double x, double *out);

/*
 Closed-form density of one (`collisions` = 1) or two collisions at radius r.

 # Safety
 `out` must be valid for writing.
 */
enum RfStatus rf_exact_rho_i(uint32_t collisions, double r, double t, double v, double *out);

/*
 Builds tables for c = 1..=c_top with truncation tolerance `epsilon`.

 # Safety
 `out` must be valid for writing; the handle is released with `rf_tables_free`.
 */
enum RfStatus rf_tables_build(uint32_t c_top, double epsilon, struct RfTableSet **out);

/*
 Loads cached tables for c = 1..=c_top from the cache directory `dir`.
 Missing counts are left out; evaluation then reports `MissingTable`.

 # Safety
 `dir` must be a NUL-terminated UTF-8 path, `out` valid for writing.
 */
enum RfStatus rf_tables_load(const char *dir,
                             uint32_t c_top,
                             double epsilon,
                             struct RfTableSet **out);

/*
 Number of tables held.

 # Safety
 `set` must come from `rf_tables_build` or `rf_tables_load`.
 */
enum RfStatus rf_tables_len(const struct RfTableSet *set, size_t *out);

/*
 Releases a table set; null is ignored.

 # Safety
 `set` must be null or an unreleased handle.
 */
void rf_tables_free(struct RfTableSet *set);

/*
 Normalized continuous density rho_I(r, t).

 # Safety
 `set` must be a live handle, `out` valid for writing.
 */
enum RfStatus rf_rho_i(const struct RfTableSet *set,
                       double r,
                       double t,
                       double v,
                       double lambda,
                       double *out);

/*
 Production density (1 - e^{-lt}) rho_I with the large-lt Gaussian blend.

 # Safety
 `set` must be a live handle, `out` valid for writing.
 */
enum RfStatus rf_ro(const struct RfTableSet *set,
                    double r,
                    double t,
                    double v,
                    double lambda,
                    double *out);

/*
 Large-lt Gaussian limit, with mass 1 - e^{-lt}.

 # Safety
 `out` must be valid for writing.
 */
enum RfStatus rf_gaussian_approx(double r, double t, double v, double lambda, double *out);

/*
 Final radii of `n` flights with exactly `c` collisions, written to `radii`.

 # Safety
 `radii` must be valid for `n` doubles.
 */
enum RfStatus rf_simulate_conditional(uint32_t c,
                                      double t,
                                      double v,
                                      uint64_t seed,
                                      uint64_t stream,
                                      size_t n,
                                      double *radii);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANDFLIGHT_H */

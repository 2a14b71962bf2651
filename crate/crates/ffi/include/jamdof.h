#ifndef JAMDOF_H
#define JAMDOF_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum JamdofStatus {
  JAMDOF_STATUS_OK = 0,
  JAMDOF_STATUS_NULL_POINTER = 1,
  JAMDOF_STATUS_INVALID_UTF8 = 2,
  JAMDOF_STATUS_INVALID_ARGUMENT = 3,
  JAMDOF_STATUS_INVALID_DISTRIBUTION = 4,
  JAMDOF_STATUS_UNSUPPORTED_DIMENSION = 5,
  JAMDOF_STATUS_DEGENERATE_MARGINAL = 6,
  JAMDOF_STATUS_NOT_SYMMETRIC = 7,
  JAMDOF_STATUS_NUMERIC = 8,
  JAMDOF_STATUS_STARVED = 9,
  JAMDOF_STATUS_BUFFER_TOO_SMALL = 10,
  JAMDOF_STATUS_PANIC = 11,
} JamdofStatus;

// Opaque jammer distribution.
typedef struct JamdofDist JamdofDist;

// Opaque DoF region.
typedef struct JamdofRegion JamdofRegion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *jamdof_version(void);

// Message of the last failed call on this thread, or NULL after a
// successful call. Valid until the next call on the same thread.
const char *jamdof_last_error(void);

// Parses the text form, e.g. `"00:0.3,01:0.3,10:0.3,11:0.1"`.
//
// # Safety
// `text` must be NUL-terminated; `out` must be writable.
enum JamdofStatus jamdof_dist_parse(const char *text, struct JamdofDist **out);

// # Safety
// `out` must be writable.
enum JamdofStatus jamdof_dist_two_user(double l00,
                                       double l01,
                                       double l10,
                                       double l11,
                                       struct JamdofDist **out);

// Symmetric distribution from `k + 1` class probabilities.
//
// # Safety
// `eta` must point to `len` doubles; `out` must be writable.
enum JamdofStatus jamdof_dist_symmetric(size_t k,
                                        const double *eta,
                                        size_t len,
                                        struct JamdofDist **out);

// # Safety
// `dist` must come from a `jamdof_dist_*` constructor or be NULL.
void jamdof_dist_free(struct JamdofDist *dist);

// # Safety
// `dist` must be a live handle; `out` must be writable.
enum JamdofStatus jamdof_dist_num_receivers(const struct JamdofDist *dist, size_t *out);

// Probability that `receiver` (0-based) is unjammed.
//
// # Safety
// `dist` must be a live handle; `out` must be writable.
enum JamdofStatus jamdof_dist_marginal(const struct JamdofDist *dist, size_t receiver, double *out);

// Region for a two-user configuration name such as `"DD"`.
//
// # Safety
// `config` must be NUL-terminated, `dist` a live handle, `out` writable.
enum JamdofStatus jamdof_region_new(const char *config,
                                    const struct JamdofDist *dist,
                                    struct JamdofRegion **out);

// Region achieved with delayed CSIT and no jamming, `k` users.
//
// # Safety
// `out` must be writable.
enum JamdofStatus jamdof_region_mat(size_t k, struct JamdofRegion **out);

// # Safety
// `region` must come from a `jamdof_region_*` constructor or be NULL.
void jamdof_region_free(struct JamdofRegion *region);

// # Safety
// `region` must be a live handle; `out` must be writable.
enum JamdofStatus jamdof_region_dim(const struct JamdofRegion *region, size_t *out);

// # Safety
// `point` must point to `len` doubles; `out` must be writable.
enum JamdofStatus jamdof_region_contains(const struct JamdofRegion *region,
                                         const double *point,
                                         size_t len,
                                         bool *out);

// # Safety
// `region` must be a live handle; `out` must be writable.
enum JamdofStatus jamdof_region_max_sum(const struct JamdofRegion *region, double *out);

// Writes the vertices of a 2-D region as `x0, y0, x1, y1, ...` in
// counter-clockwise order starting at the origin. `count` receives
// the number of vertices even when `capacity` (in vertices) is too small.
//
// # Safety
// `xy` must hold `2 * capacity` doubles; `count` must be writable.
enum JamdofStatus jamdof_region_vertices(const struct JamdofRegion *region,
                                         double *xy,
                                         size_t capacity,
                                         size_t *count);

// Sum-DoF with delayed CSIT and no jamming, `k` users.
//
// # Safety
// `out` must be writable.
enum JamdofStatus jamdof_dof_mat(size_t k, double *out);

// Optimal sum-DoF for any configuration, including `"DP-K"` and `"DD-K"`.
//
// # Safety
// `config` must be NUL-terminated, `dist` a live handle, `out` writable.
enum JamdofStatus jamdof_sum_dof(const char *config, const struct JamdofDist *dist, double *out);

// Monte-Carlo DoF estimate. With `budgets_len > 0` every receiver gets
// its symbol budget; otherwise the scheme runs for `n` slots.
// `mean` and `stderr` each receive `out_len` doubles, which must equal
// the number of receivers.
//
// # Safety
// Pointers must be valid for the stated lengths.
enum JamdofStatus jamdof_estimate(const char *config,
                                  const struct JamdofDist *dist,
                                  const uint64_t *budgets,
                                  size_t budgets_len,
                                  uint64_t n,
                                  size_t trials,
                                  uint64_t seed,
                                  double *mean,
                                  double *stderr,
                                  size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JAMDOF_H */

#ifndef DCP_H
#define DCP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  DCP_METHOD_APPROXIMATE = 0,
  DCP_METHOD_CPDD = 1,
  DCP_METHOD_CPDM = 2,
  DCP_METHOD_SPLIT = 3,
} DcpMethod;

typedef enum {
  DCP_FITTER_LASSO = 0,
  DCP_FITTER_RIDGE = 1,
  DCP_FITTER_LEAST_SQUARES_ON_SUPPORT = 2,
  DCP_FITTER_CONSTANT_MEAN = 3,
} DcpFitter;

typedef enum {
  DCP_ROUNDING_NEAREST = 0,
  DCP_ROUNDING_RANDOMIZED = 1,
} DcpRounding;

typedef enum {
  DCP_STATUS_OK = 0,
  DCP_STATUS_NULL_POINTER = 1,
  DCP_STATUS_INVALID_INPUT = 2,
  DCP_STATUS_INVALID_RANGE = 3,
  DCP_STATUS_DIMENSION = 4,
  DCP_STATUS_SINGULAR = 5,
  DCP_STATUS_CONFIG = 6,
  DCP_STATUS_OUT_OF_BOUNDS = 7,
  DCP_STATUS_EMPTY = 8,
  DCP_STATUS_PANIC = 9,
} DcpStatus;

/**
 * Opaque training data handle.
 */
typedef struct DcpDataset DcpDataset;

/**
 * Opaque prediction set handle.
 */
typedef struct DcpPredictionSet DcpPredictionSet;

/**
 * Prediction settings. Start from [`dcp_config_default`].
 */
typedef struct {
  double alpha;
  DcpMethod method;
  DcpFitter fitter;
  /**
   * Penalty; a negative value selects `sqrt(ln p / 2n)`.
   */
  double lambda;
  /**
   * Number of grid points over the training response range.
   */
  size_t grid_size;
  DcpRounding rounding;
  /**
   * Seeds randomized rounding and the split method.
   */
  uint64_t seed;
  bool intercept;
  double tol;
  size_t max_iter;
} DcpConfig;

/**
 * One piece of a prediction set. Infinite ends are `±INFINITY` and always open.
 */
typedef struct {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;
} DcpInterval;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *dcp_last_error_message(void);

/**
 * Static, NUL-terminated crate version.
 */
const char *dcp_version(void);

DcpConfig dcp_config_default(void);

/**
 * Copies an `n x p` row-major feature matrix and `n` responses into a new dataset.
 *
 * # Safety
 * `x` must point to `n * p` doubles, `y` to `n` doubles and `out` to writable storage.
 */
DcpStatus dcp_dataset_new(size_t n, size_t p, const double *x, const double *y, DcpDataset **out);

/**
 * # Safety
 * `data` must be null or a live handle from [`dcp_dataset_new`].
 */
size_t dcp_dataset_n(const DcpDataset *data);

/**
 * # Safety
 * `data` must be null or a live handle from [`dcp_dataset_new`].
 */
size_t dcp_dataset_p(const DcpDataset *data);

/**
 * # Safety
 * `data` must be null or a handle from [`dcp_dataset_new`] not yet freed.
 */
void dcp_dataset_free(DcpDataset *data);

/**
 * Builds the prediction set at covariate `x` (length `p`).
 *
 * # Safety
 * `data` must be a live dataset handle, `x` must point to `p` doubles, `cfg`
 * to a valid config and `out` to writable storage.
 */
DcpStatus dcp_predict(const DcpDataset *data,
                      const double *x,
                      size_t p,
                      const DcpConfig *cfg,
                      DcpPredictionSet **out);

/**
 * Number of disjoint intervals in the set (0 for null or empty).
 *
 * # Safety
 * `set` must be null or a live handle from [`dcp_predict`].
 */
size_t dcp_prediction_set_count(const DcpPredictionSet *set);

/**
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
DcpStatus dcp_prediction_set_interval(const DcpPredictionSet *set, size_t index, DcpInterval *out);

/**
 * Smallest interval containing the set; `DCP_STATUS_EMPTY` for an empty set.
 *
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
DcpStatus dcp_prediction_set_hull(const DcpPredictionSet *set, DcpInterval *out);

/**
 * # Safety
 * `set` must be null or a live handle.
 */
bool dcp_prediction_set_contains(const DcpPredictionSet *set, double y);

/**
 * Lebesgue measure, with unbounded ends clipped to the grid's length window.
 * NaN for a null handle.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
double dcp_prediction_set_length(const DcpPredictionSet *set);

/**
 * # Safety
 * `set` must be null or a handle from [`dcp_predict`] not yet freed.
 */
void dcp_prediction_set_free(DcpPredictionSet *set);

/**
 * The `ceil((1 - alpha)(n + 1))`-th smallest of `n` residuals, or `+INFINITY`
 * when that rank exceeds `n`.
 *
 * # Safety
 * `residuals` must point to `n` doubles and `out` must be writable.
 */
DcpStatus dcp_conformal_quantile(const double *residuals, size_t n, double alpha, double *out);

/**
 * Standard normal quantile for `p` in (0, 1).
 *
 * # Safety
 * `out` must be writable.
 */
DcpStatus dcp_normal_quantile(double p, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DCP_H */

#ifndef DCMWALK_H
#define DCMWALK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Numeric values 2, 3 and 4 match the command-line exit codes.
typedef enum DcmStatus {
  DCM_STATUS_OK = 0,
  DCM_STATUS_IO = 1,
  DCM_STATUS_VALIDATION = 2,
  DCM_STATUS_NUMERICAL = 3,
  DCM_STATUS_CAPACITY = 4,
  DCM_STATUS_NULL_POINTER = 5,
  DCM_STATUS_PANIC = 6,
} DcmStatus;

typedef struct DcmDistribution DcmDistribution;

typedef struct DcmGraph DcmGraph;

typedef struct DcmStationary DcmStationary;

// Scalars of the parameter report. Absent values are NaN; +∞ is INFINITY.
typedef struct DcmParams {
  double lambda;
  double nu;
  double s_minus;
  double nu_hat;
  double h_hat;
  double h_plus;
  double a0;
  double phi_a0;
  double exponent;
} DcmParams;

typedef struct DcmStationarySummary {
  double pi_min;
  double pi_max;
  double residual;
  size_t support_size;
  double exponent_observed;
} DcmStationarySummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread. Valid until the next call
// into this library from the same thread.
const char *dcm_last_error(void);

// Parses a distribution from a NUL-terminated `{"pmf": [...]}` JSON string.
//
// # Safety
// `json` must be a valid C string and `out` a valid pointer.
enum DcmStatus dcm_distribution_from_json(const char *json, struct DcmDistribution **out);

// The four-atom example law with in-degrees {0, 5} and out-degrees {2, 3}.
//
// # Safety
// `out` must be a valid pointer.
enum DcmStatus dcm_distribution_toy(struct DcmDistribution **out);

// # Safety
// `d` must come from this library and not be used afterwards.
void dcm_distribution_free(struct DcmDistribution *d);

// # Safety
// `d` and `out` must be valid pointers.
enum DcmStatus dcm_params(const struct DcmDistribution *d, struct DcmParams *out);

// Predicted exponent for the r-out digraph.
//
// # Safety
// `out` must be a valid pointer.
enum DcmStatus dcm_rout_exponent(uint32_t r, double *out);

// Realizes `d` at size `n` and samples a configuration with `seed`.
//
// # Safety
// `d` and `out` must be valid pointers.
enum DcmStatus dcm_graph_sample(const struct DcmDistribution *d,
                                size_t n,
                                uint64_t seed,
                                struct DcmGraph **out);

// Builds a graph on `n` vertices from `len` edges `src[i] -> dst[i]`.
//
// # Safety
// `src` and `dst` must point to `len` values each; `out` must be valid.
enum DcmStatus dcm_graph_from_edges(size_t n,
                                    const uint32_t *src,
                                    const uint32_t *dst,
                                    size_t len,
                                    struct DcmGraph **out);

// Vertex count, or 0 for a null handle.
//
// # Safety
// `g` must be null or a valid handle.
size_t dcm_graph_n(const struct DcmGraph *g);

// Edge count, or 0 for a null handle.
//
// # Safety
// `g` must be null or a valid handle.
size_t dcm_graph_m(const struct DcmGraph *g);

// # Safety
// `g` must come from this library and not be used afterwards.
void dcm_graph_free(struct DcmGraph *g);

// Stationary distribution by lazy power iteration to tolerance `tol`.
//
// # Safety
// `g` and `out` must be valid pointers.
enum DcmStatus dcm_stationary(const struct DcmGraph *g, double tol, struct DcmStationary **out);

// # Safety
// `s` and `out` must be valid pointers.
enum DcmStatus dcm_stationary_summary(const struct DcmStationary *s,
                                      struct DcmStationarySummary *out);

// Copies π into `buf`, which must hold `len` ≥ n values.
//
// # Safety
// `s` must be valid and `buf` must point to `len` writable doubles.
enum DcmStatus dcm_stationary_pi(const struct DcmStationary *s, double *buf, size_t len);

// # Safety
// `s` must come from this library and not be used afterwards.
void dcm_stationary_free(struct DcmStationary *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DCMWALK_H */

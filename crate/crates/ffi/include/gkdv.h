#ifndef GKDV_H
#define GKDV_H

/* Generated by cbindgen from the gkdv-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a call across the C boundary.
typedef enum GkdvStatus {
  // The call succeeded and all `out` parameters are valid.
  GKDV_STATUS_OK = 0,
  // A required pointer argument was `NULL`.
  GKDV_STATUS_NULL_POINTER = 1,
  // An argument was out of range or otherwise rejected.
  GKDV_STATUS_INVALID_ARGUMENT = 2,
  // A string argument was not valid UTF-8.
  GKDV_STATUS_INVALID_UTF8 = 3,
  // Reading or writing a file failed.
  GKDV_STATUS_IO = 4,
  // The solution left the valid range before the requested horizon.
  GKDV_STATUS_BLOW_UP = 5,
  // An internal invariant failed; the library state is still consistent.
  GKDV_STATUS_INTERNAL = 6,
} GkdvStatus;

// Opaque handle for real samples on a periodic grid.
typedef struct GkdvField GkdvField;

// Opaque handle for an in-flight integration. Blow-up latches: once a step
// fails, the handle keeps reporting the last valid state and rejects
// further advances.
typedef struct GkdvFlow GkdvFlow;

// Opaque handle for a polynomial advection model.
typedef struct GkdvModel GkdvModel;

// Opaque handle for a finished scenario run and its artifacts.
typedef struct GkdvRun GkdvRun;

// One row of scalar diagnostics for a field or a point along a run.
typedef struct GkdvSample {
  // Simulation time of the sample.
  double t;
  // `L^2` norm.
  double h0;
  // `H^1` norm.
  double h1;
  // `H^2` norm.
  double h2;
  // Max magnitude on the grid.
  double linf;
  // Integral of the field.
  double mass;
  // Integral of the squared field.
  double momentum;
  // Parabola-refined location of the largest value.
  double peak_x;
  // Refined height at that location.
  double peak_value;
} GkdvSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string; do not free it.
const char *gkdv_version(void);

// Copy the current thread's last error message into `buf`.
//
// Writes at most `cap - 1` bytes plus a NUL terminator and returns the full
// message length in bytes (excluding the NUL), so a second call with a
// buffer of `length + 1` bytes retrieves the whole message. With a `NULL`
// buffer or `cap == 0` nothing is written and only the length is returned.
//
// # Safety
// `buf` must be `NULL` or valid for writes of `cap` bytes.
size_t gkdv_last_error(char *buf, size_t cap);

// Free a string returned by this library (currently only
// [`gkdv_model_bounds_json`]).
//
// # Safety
// `s` must be `NULL` or a pointer returned by a `*_json` function of this
// library and not yet freed.
void gkdv_string_free(char *s);

// Create a model `U_t + nu U_xxx + nu (G(U))_x = 0` with
// `G'(U) = sum coeffs[j] U^{j+1}`.
//
// `coeffs` holds the advection polynomial's coefficients from the linear
// term up; at least one is required and the last must be nonzero. `nu`
// scales both the dispersive and the advective term and must be positive.
//
// # Safety
// `coeffs` must be valid for reads of `len` doubles; `out` must be valid
// for writes.
enum GkdvStatus gkdv_model_new(const double *coeffs, size_t len, double nu, struct GkdvModel **out);

// Release a model handle; `NULL` is ignored.
//
// # Safety
// `model` must be `NULL` or an unfreed pointer from [`gkdv_model_new`].
void gkdv_model_free(struct GkdvModel *model);

// Degree of the model's advection polynomial.
//
// # Safety
// `model` must be a live handle; `out` must be valid for writes.
enum GkdvStatus gkdv_model_degree(const struct GkdvModel *model, uint32_t *out);

// Evaluate the advection polynomial at `u`.
//
// # Safety
// `model` must be a live handle; `out` must be valid for writes.
enum GkdvStatus gkdv_model_eval(const struct GkdvModel *model, double u, double *out);

// Predicted timescales and size bounds for a datum of `H^2` size `epsilon`
// under this model, as a JSON object. Free the string with
// [`gkdv_string_free`].
//
// # Safety
// `model` must be a live handle; `out_json` must be valid for writes.
enum GkdvStatus gkdv_model_bounds_json(const struct GkdvModel *model,
                                       double epsilon,
                                       double window_constant,
                                       char **out_json);

// Closed-form `H^2` norm of the traveling-wave profile with exponent `k`
// and speed `c`. Available for `k = 1` and `k = 2` only.
//
// # Safety
// `out` must be valid for writes.
enum GkdvStatus gkdv_soliton_h2(uint32_t k, double c, double *out);

// Sample the traveling-wave profile with exponent `k`, speed `c`, and
// center `x0` on a periodic grid of `points` nodes spanning
// `[-half_width, half_width)`. `points` must be even and at least 16.
//
// # Safety
// `out` must be valid for writes.
enum GkdvStatus gkdv_field_soliton(uint32_t k,
                                   double c,
                                   double x0,
                                   double half_width,
                                   size_t points,
                                   struct GkdvField **out);

// Wrap caller-provided samples on a periodic grid of `len` nodes spanning
// `[-half_width, half_width)`. The values are copied; all must be finite.
//
// # Safety
// `values` must be valid for reads of `len` doubles; `out` must be valid
// for writes.
enum GkdvStatus gkdv_field_from_values(double half_width,
                                       const double *values,
                                       size_t len,
                                       struct GkdvField **out);

// Release a field handle; `NULL` is ignored.
//
// # Safety
// `field` must be `NULL` or an unfreed pointer from a field constructor.
void gkdv_field_free(struct GkdvField *field);

// Number of grid nodes the field is sampled on.
//
// # Safety
// `field` must be a live handle; `out` must be valid for writes.
enum GkdvStatus gkdv_field_len(const struct GkdvField *field, size_t *out);

// Copy the field's sample values into `buf`, which must hold at least
// [`gkdv_field_len`] doubles.
//
// # Safety
// `field` must be a live handle; `buf` must be valid for writes of `cap`
// doubles.
enum GkdvStatus gkdv_field_copy_values(const struct GkdvField *field, double *buf, size_t cap);

// Copy the field's grid coordinates into `buf`, which must hold at least
// [`gkdv_field_len`] doubles.
//
// # Safety
// `field` must be a live handle; `buf` must be valid for writes of `cap`
// doubles.
enum GkdvStatus gkdv_field_copy_points(const struct GkdvField *field, double *buf, size_t cap);

// Scalar diagnostics of the field (norms, invariants, refined peak),
// reported with the time column set to `t`.
//
// # Safety
// `field` must be a live handle; `out` must be valid for writes.
enum GkdvStatus gkdv_field_sample(const struct GkdvField *field, double t, struct GkdvSample *out);

// Start an integration of the model from `initial` with step `dt`.
// The field and model are copied into the flow; both handles remain owned
// by the caller.
//
// # Safety
// `model` and `initial` must be live handles; `out` must be valid for
// writes.
enum GkdvStatus gkdv_flow_new(const struct GkdvModel *model,
                              const struct GkdvField *initial,
                              double dt,
                              struct GkdvFlow **out);

// Release a flow handle; `NULL` is ignored.
//
// # Safety
// `flow` must be `NULL` or an unfreed pointer from [`gkdv_flow_new`].
void gkdv_flow_free(struct GkdvFlow *flow);

// Advance the flow by `steps` steps of its `dt`.
//
// On `GKDV_STATUS_BLOW_UP` the flow stops at the last valid state, which
// remains readable; advancing further is rejected with the same status.
//
// # Safety
// `flow` must be a live handle with no other outstanding use.
enum GkdvStatus gkdv_flow_advance(struct GkdvFlow *flow, uint64_t steps);

// Elapsed simulation time of the flow.
//
// # Safety
// `flow` must be a live handle; `out` must be valid for writes.
enum GkdvStatus gkdv_flow_time(const struct GkdvFlow *flow, double *out);

// Copy the flow's current state into `buf`, which must hold at least as
// many doubles as the initial field had nodes.
//
// # Safety
// `flow` must be a live handle; `buf` must be valid for writes of `cap`
// doubles.
enum GkdvStatus gkdv_flow_copy_state(const struct GkdvFlow *flow, double *buf, size_t cap);

// Scalar diagnostics of the flow's current state at its current time.
//
// # Safety
// `flow` must be a live handle; `out` must be valid for writes.
enum GkdvStatus gkdv_flow_sample(const struct GkdvFlow *flow, struct GkdvSample *out);

// Load a scenario from a TOML file, integrate it, and optionally write the
// artifact bundle.
//
// `artifact_dir` may be `NULL` to skip writing artifacts. A run that ends
// in blow-up still returns `GKDV_STATUS_OK` with a usable handle; query the
// outcome with [`gkdv_run_status`]. Errors (unreadable file, invalid
// configuration) return without writing `out`.
//
// # Safety
// `config_path` must point to a NUL-terminated string; `artifact_dir` must
// be `NULL` or NUL-terminated; `out` must be valid for writes.
enum GkdvStatus gkdv_run_scenario(const char *config_path,
                                  const char *artifact_dir,
                                  struct GkdvRun **out);

// Release a run handle; `NULL` is ignored.
//
// # Safety
// `run` must be `NULL` or an unfreed pointer from [`gkdv_run_scenario`].
void gkdv_run_free(struct GkdvRun *run);

// Outcome of a finished run: whether it reached its horizon, and the last
// valid simulation time (the horizon when `completed`, the blow-up time
// otherwise).
//
// # Safety
// `run` must be a live handle; `completed` and `t_last` must be valid for
// writes.
enum GkdvStatus gkdv_run_status(const struct GkdvRun *run, bool *completed, double *t_last);

// Number of diagnostic samples the run recorded.
//
// # Safety
// `run` must be a live handle; `out` must be valid for writes.
enum GkdvStatus gkdv_run_sample_count(const struct GkdvRun *run, size_t *out);

// Fetch the diagnostic sample at `index` (0-based, in time order).
//
// # Safety
// `run` must be a live handle; `out` must be valid for writes.
enum GkdvStatus gkdv_run_sample(const struct GkdvRun *run, size_t index, struct GkdvSample *out);

// Wall-clock seconds the integration took.
//
// # Safety
// `run` must be a live handle; `out` must be valid for writes.
enum GkdvStatus gkdv_run_wall_seconds(const struct GkdvRun *run, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GKDV_H */

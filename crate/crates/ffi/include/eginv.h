#ifndef EGINV_H
#define EGINV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Instance kinds.
typedef enum EgInstance {
  EG_INSTANCE_MATRIX = 0,
  EG_INSTANCE_SEQUENCE = 1,
} EgInstance;

// Solver choice for `eg_solve`.
typedef enum EgMethod {
  EG_METHOD_AUTO = 0,
  EG_METHOD_CANONICAL = 1,
  EG_METHOD_GENERAL = 2,
} EgMethod;

// Status codes returned by every entry point.
typedef enum EgStatus {
  EG_STATUS_OK = 0,
  // a required pointer argument was null
  EG_STATUS_NULL_ARGUMENT = 1,
  // text or file could not be parsed
  EG_STATUS_PARSE_ERROR = 2,
  // arguments out of range (dimensions, indices, method)
  EG_STATUS_INVALID_ARGUMENT = 3,
  // the data violates the compatibility conditions
  EG_STATUS_CONDITION_FAIL = 4,
  // the data admit no solution
  EG_STATUS_NO_SOLUTION = 5,
  // the requested method does not apply to these data
  EG_STATUS_REFUSED = 6,
  // numerical failure or internal error
  EG_STATUS_INTERNAL = 7,
  // a panic was caught at the boundary
  EG_STATUS_PANIC = 8,
} EgStatus;

// Opaque data set {alpha, beta, gamma, delta}.
typedef struct EgDataSet EgDataSet;

// Opaque algebra element (a solution g).
typedef struct EgElement EgElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version string of the library (static, do not free).
const char *eg_version(void);

// Message for the last failure on this thread, or null. Valid until the next eg_* call.
const char *eg_last_error(void);

// Parse a data-set JSON document.
enum EgStatus eg_dataset_from_json(const char *text, struct EgDataSet **out);

// Read a data-set JSON file.
enum EgStatus eg_dataset_from_file(const char *path, struct EgDataSet **out);

void eg_dataset_free(struct EgDataSet *ds);

// Instance kind and dimensions of a data set. Any output pointer may be null.
enum EgStatus eg_dataset_info(const struct EgDataSet *ds,
                              enum EgInstance *kind,
                              uintptr_t *p,
                              uintptr_t *q);

// Serialize a data set to JSON. Free the string with `eg_string_free`.
enum EgStatus eg_dataset_to_json(const struct EgDataSet *ds, char **out);

void eg_string_free(char *s);

// Evaluate C1-C6. `residuals` (may be null) receives six values; NaN marks a
// condition that could not be evaluated. Returns EG_STATUS_CONDITION_FAIL when C1-C3 fail.
enum EgStatus eg_check(const struct EgDataSet *ds,
                       double tolerance,
                       double *residuals,
                       int *all_pass);

// Solve for g. On EG_STATUS_OK `*g_out` holds the solution. `inclusion` (may be null)
// receives the four inclusion residuals when they were computed.
// `tolerance <= 0` selects the default.
enum EgStatus eg_solve(const struct EgDataSet *ds,
                       enum EgMethod method,
                       double tolerance,
                       struct EgElement **g_out,
                       double *inclusion);

// Structured inverse of Omega(g). `residuals` (may be null) receives
// ||Omega R - I||_F and ||R Omega - I||_F.
enum EgStatus eg_invert(const struct EgDataSet *ds,
                        const struct EgElement *g,
                        double tolerance,
                        double *residuals);

// Random data set and its generating g (deterministic in `seed`).
enum EgStatus eg_generate(enum EgInstance kind,
                          uintptr_t p,
                          uintptr_t q,
                          uintptr_t degree,
                          uint64_t seed,
                          struct EgDataSet **ds_out,
                          struct EgElement **g_out);

void eg_element_free(struct EgElement *g);

// Entry (row, col) of coefficient j (use j = 0 for the matrix instance).
enum EgStatus eg_element_entry(const struct EgElement *g,
                               int64_t j,
                               uintptr_t row,
                               uintptr_t col,
                               double *re,
                               double *im);

// Serialize an element as an element-file JSON document. Free with `eg_string_free`.
enum EgStatus eg_element_to_json(const struct EgElement *g, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EGINV_H */

#ifndef SANTALO_H
#define SANTALO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SantaloStatus {
  SANTALO_STATUS_OK = 0,
  /**
   * The checked inequality does not hold.
   */
  SANTALO_STATUS_VERIFIED_FAIL = 1,
  /**
   * The solver stopped without meeting its tolerance.
   */
  SANTALO_STATUS_NOT_CONVERGED = 2,
  SANTALO_STATUS_INVALID_INPUT = 3,
  SANTALO_STATUS_NULL_POINTER = 4,
  SANTALO_STATUS_PANIC = 5,
} SantaloStatus;

typedef enum SantaloWeight {
  SANTALO_WEIGHT_INDICATOR_UNIT = 0,
  SANTALO_WEIGHT_GAUSSIAN = 1,
} SantaloWeight;

/**
 * A weighted point cloud.
 */
typedef struct SantaloCloud SantaloCloud;

/**
 * An equipartition result: the tree and its cone masses.
 */
typedef struct SantaloTree SantaloTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *santalo_last_error(void);

/**
 * Creates a cloud from `len` points (`coords` holds `len * dim` values,
 * row by row) with positive `weights`. Returns NULL on invalid input.
 *
 * # Safety
 * `coords` and `weights` must point to arrays of the stated lengths.
 */
struct SantaloCloud *santalo_cloud_new(size_t dim,
                                       const double *coords,
                                       const double *weights,
                                       size_t len);

/**
 * # Safety
 * `cloud` must come from [`santalo_cloud_new`] and not be freed twice.
 */
void santalo_cloud_free(struct SantaloCloud *cloud);

/**
 * Computes a Yao-Yao equipartition (dimension 1 to 3). On `Ok` and on
 * `NotConverged` a tree is stored in `*out` (the best attempt in the
 * latter case) and must be released with [`santalo_tree_free`].
 *
 * # Safety
 * `cloud` must be a live cloud and `out` a writable pointer.
 */
enum SantaloStatus santalo_equipartition(const struct SantaloCloud *cloud,
                                         double mass_tol,
                                         bool even,
                                         struct SantaloTree **out);

/**
 * # Safety
 * `tree` must come from [`santalo_equipartition`] and not be freed twice.
 */
void santalo_tree_free(struct SantaloTree *tree);

/**
 * Ambient dimension of the tree (0 for NULL).
 *
 * # Safety
 * `tree` must be NULL or a live tree.
 */
size_t santalo_tree_dim(const struct SantaloTree *tree);

/**
 * Number of cones, `2^dim` (0 for NULL).
 *
 * # Safety
 * `tree` must be NULL or a live tree.
 */
size_t santalo_tree_leaf_count(const struct SantaloTree *tree);

/**
 * Largest deviation of a cone mass from `total / 2^dim`.
 *
 * # Safety
 * `tree` must be NULL or a live tree.
 */
double santalo_tree_max_imbalance(const struct SantaloTree *tree);

/**
 * Writes the center (`dim` values) to `out`.
 *
 * # Safety
 * `tree` must be a live tree and `out` must hold `len` doubles.
 */
enum SantaloStatus santalo_tree_center(const struct SantaloTree *tree, double *out, size_t len);

/**
 * Writes the cone masses (`leaf_count` values, leaf order) to `out`.
 *
 * # Safety
 * `tree` must be a live tree and `out` must hold `len` doubles.
 */
enum SantaloStatus santalo_tree_cone_masses(const struct SantaloTree *tree,
                                            double *out,
                                            size_t len);

/**
 * The equipartition report as JSON; release with [`santalo_string_free`].
 * Returns NULL on failure.
 *
 * # Safety
 * `tree` must be NULL or a live tree.
 */
char *santalo_tree_to_json(const struct SantaloTree *tree);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void santalo_string_free(char *s);

/**
 * `int_{R^n} rho(|x|) dx` for a built-in weight.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum SantaloStatus santalo_weight_integral(enum SantaloWeight weight, size_t n, double *out);

/**
 * Volume product of the polytope with `count` vertices (row by row in
 * `vertices`, `dim` values each) about the point `z`, against `v_n^2`.
 * Returns `VerifiedFail` when the product exceeds the bound.
 *
 * # Safety
 * Arrays must have the stated lengths; `product` and `bound` must be
 * writable.
 */
enum SantaloStatus santalo_volume_product(const double *vertices,
                                          size_t count,
                                          size_t dim,
                                          const double *z,
                                          double *product,
                                          double *bound);

/**
 * Evaluates the built-in one-dimensional counterexample with the
 * barycenter as center: `lhs = int f int g`, `rhs = (int rho)^2`.
 * Returns `VerifiedFail`, since `lhs > rhs`.
 *
 * # Safety
 * `lhs` and `rhs` must be writable.
 */
enum SantaloStatus santalo_barycenter_counterexample(double *lhs, double *rhs);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SANTALO_H */

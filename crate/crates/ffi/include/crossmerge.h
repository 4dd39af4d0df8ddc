#ifndef CROSSMERGE_H
#define CROSSMERGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CmStatus {
  CM_STATUS_OK = 0,
  CM_STATUS_NULL_POINTER = 1,
  CM_STATUS_INVALID_ARGUMENT = 2,
  CM_STATUS_UNSORTED_INPUT = 3,
  CM_STATUS_OUT_OF_RANGE = 4,
  CM_STATUS_POOL_FAILURE = 5,
  CM_STATUS_PANIC = 6,
} CmStatus;

/**
 * Worker pool handle.
 */
typedef struct CmExecutor CmExecutor;

/**
 * Merge plan handle.
 */
typedef struct CmPlan CmPlan;

/**
 * One merge subproblem. `side` is 0 for an A-side task and 1 for a B-side
 * task; `case_letter` is one of `'a'` to `'e'`.
 */
typedef struct CmTask {
  uint8_t side;
  uint8_t case_letter;
  size_t a_start;
  size_t a_end;
  size_t b_start;
  size_t b_end;
  size_t out_offset;
} CmTask;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, NUL-terminated description of a status code.
 */
const char *cm_status_message(enum CmStatus status);

/**
 * Creates a pool of `workers` threads. `oversubscription` is the number of
 * blocks per worker used when a call passes `p == 0` (0 is treated as 1).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CmStatus cm_executor_new(size_t workers, size_t oversubscription, struct CmExecutor **out);

/**
 * # Safety
 * `executor` must be NULL or a handle from [`cm_executor_new`] not yet freed.
 */
void cm_executor_free(struct CmExecutor *executor);

/**
 * Stable merge of sorted `a` (length `n`) and sorted `b` (length `m`) into
 * `out_keys` (length `n + m`). When non-NULL, `out_origin` receives 0 or 1
 * (A or B) and `out_index` the source position of each output element.
 * `p == 0` selects the executor's default block count.
 *
 * # Safety
 * All non-NULL pointers must be valid for their stated lengths; `n + m` for
 * the three outputs.
 */
enum CmStatus cm_merge_i64(const struct CmExecutor *executor,
                           const int64_t *a,
                           size_t n,
                           const int64_t *b,
                           size_t m,
                           size_t p,
                           int64_t *out_keys,
                           uint8_t *out_origin,
                           size_t *out_index);

/**
 * Stable in-place sort of `v` (length `n`) with `p` initial blocks
 * (`p == 0` for the executor default). When non-NULL, `out_perm` receives
 * for each output position the original index of the element now there.
 *
 * # Safety
 * `v` must be valid for `n` reads and writes and `out_perm`, when non-NULL,
 * for `n` writes.
 */
enum CmStatus cm_sort_i64(const struct CmExecutor *executor,
                          int64_t *v,
                          size_t n,
                          size_t p,
                          size_t *out_perm);

/**
 * Number of elements of sorted `x` strictly less than `key`.
 *
 * # Safety
 * `x` must be valid for `len` reads; `out` must be writable.
 */
enum CmStatus cm_rank_low_i64(int64_t key, const int64_t *x, size_t len, size_t *out);

/**
 * Number of elements of sorted `x` less than or equal to `key`.
 *
 * # Safety
 * `x` must be valid for `len` reads; `out` must be writable.
 */
enum CmStatus cm_rank_high_i64(int64_t key, const int64_t *x, size_t len, size_t *out);

/**
 * Builds the merge plan of sorted `a` and `b` with `p` blocks each.
 *
 * # Safety
 * `a`, `b` must be valid for `n`, `m` reads; `out` must be writable.
 */
enum CmStatus cm_plan_new_i64(const int64_t *a,
                              size_t n,
                              const int64_t *b,
                              size_t m,
                              size_t p,
                              struct CmPlan **out);

/**
 * Number of tasks (`2p`), or 0 for NULL.
 *
 * # Safety
 * `plan` must be NULL or a live handle.
 */
size_t cm_plan_task_count(const struct CmPlan *plan);

/**
 * Copies task `index` into `out`. Tasks are ordered A-side blocks `0..p`,
 * then B-side blocks `0..p`.
 *
 * # Safety
 * `plan` must be a live handle and `out` writable.
 */
enum CmStatus cm_plan_get_task(const struct CmPlan *plan, size_t index, struct CmTask *out);

/**
 * # Safety
 * `plan` must be NULL or a handle from [`cm_plan_new_i64`] not yet freed.
 */
void cm_plan_free(struct CmPlan *plan);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CROSSMERGE_H */

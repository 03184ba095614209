#ifndef GXBTC_H
#define GXBTC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum GxStatus {
  GX_STATUS_OK = 0,
  GX_STATUS_NULL_POINTER = 1,
  GX_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed JSON, unreadable file, or data violating the theory's rules.
   */
  GX_STATUS_INVALID_DATA = 3,
  /**
   * A precondition of the requested operation does not hold.
   */
  GX_STATUS_PRECONDITION = 4,
  /**
   * The requested root order cannot represent the needed classes.
   */
  GX_STATUS_ROOT_ORDER_TOO_SMALL = 5,
  /**
   * The search budget ran out before a decision.
   */
  GX_STATUS_BUDGET_EXCEEDED = 6,
  /**
   * The relative obstruction of `t` is not a coboundary.
   */
  GX_STATUS_OBSTRUCTED = 7,
  /**
   * Internal failure, including caught panics.
   */
  GX_STATUS_INTERNAL = 8,
} GxStatus;

/**
 * Opaque handle to a G-crossed braided theory.
 */
typedef struct GxTheoryHandle GxTheoryHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *gx_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gx_string_free(char *s);

/**
 * Releases a theory handle. Null is ignored.
 *
 * # Safety
 * `t` must come from this library and not have been freed.
 */
void gx_theory_free(struct GxTheoryHandle *t);

/**
 * Parses a theory from its JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum GxStatus gx_theory_from_json(const char *json, struct GxTheoryHandle **out);

/**
 * Loads a theory from a JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum GxStatus gx_theory_load(const char *path, struct GxTheoryHandle **out);

/**
 * Builds a named fixture (`toric-code`, `semion`, `double-semion`, `z4`, ...).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum GxStatus gx_theory_fixture(const char *name, struct GxTheoryHandle **out);

/**
 * Serializes a theory to JSON; free the result with [`gx_string_free`].
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum GxStatus gx_theory_to_json(const struct GxTheoryHandle *t, char **out);

/**
 * Number of simple objects, or 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t gx_theory_num_charges(const struct GxTheoryHandle *t);

/**
 * Order of the symmetry group, or 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t gx_theory_group_order(const struct GxTheoryHandle *t);

/**
 * Runs every consistency equation with up to `max_defects` nontrivial
 * defects. Writes the worst residual and whether all equations passed
 * within `tol`. Table validation failures count as not passed.
 *
 * # Safety
 * `t` must be a live handle; the out-pointers must be writable.
 */
enum GxStatus gx_theory_check(const struct GxTheoryHandle *t,
                              double tol,
                              size_t max_defects,
                              double *out_worst,
                              bool *out_passed);

/**
 * Trivial extension of `c0` by the group described by `group_spec`
 * (for example `"Z2"`, `"Z2xZ3"`, `"S3"`).
 *
 * # Safety
 * `c0` must be a live handle, `group_spec` a NUL-terminated string and
 * `out` writable.
 */
enum GxStatus gx_trivial_extension(const struct GxTheoryHandle *c0,
                                   const char *group_spec,
                                   struct GxTheoryHandle **out);

/**
 * Applies the torsor `(t, X)` given as cochain JSON documents. When `x_json`
 * is null a cocycleator is solved for with root order `root_order` (0 picks
 * the lcm of |G|, the number of abelian charges and 8); an obstructed `t`
 * returns [`GxStatus::Obstructed`].
 *
 * # Safety
 * `theory` must be a live handle, `t_json` a NUL-terminated string,
 * `x_json` null or a NUL-terminated string, and `out` writable.
 */
enum GxStatus gx_apply_torsor(const struct GxTheoryHandle *theory,
                              const char *t_json,
                              const char *x_json,
                              uint64_t root_order,
                              struct GxTheoryHandle **out);

/**
 * Decides gauge-and-relabeling equivalence. `budget` bounds the number of
 * relabelings visited; running out returns [`GxStatus::BudgetExceeded`].
 *
 * # Safety
 * `a` and `b` must be live handles; `out_equivalent` must be writable.
 */
enum GxStatus gx_theories_equivalent(const struct GxTheoryHandle *a,
                                     const struct GxTheoryHandle *b,
                                     size_t budget,
                                     double tol,
                                     bool *out_equivalent);

/**
 * Structure of `H^degree(G, M)` as text such as `"Z2xZ2"` or `"0"`. `coeff`
 * is `"u1"` (with `root_order`, 0 for the default) or `"z<N>"` with trivial
 * action. Free the result with [`gx_string_free`].
 *
 * # Safety
 * `group_spec` and `coeff` must be NUL-terminated strings; `out` writable.
 */
enum GxStatus gx_cohomology_structure(const char *group_spec,
                                      const char *coeff,
                                      size_t degree,
                                      uint64_t root_order,
                                      char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GXBTC_H */
